"""DTW of two curves under vertex edits.

Both curves are cut into subcurves of size about m0**beta.  For every pair of
subcurves the block of the DTW grid they span is summarised by its augmented
boundary table (see ``monge``).  Adjacent blocks share one row or column of
grid vertices, so the sinks of a block are sources of the blocks below and to
its right.

An edit changes one or two subcurves, and only the block rows (edit on P) or
block columns (edit on Q) of those subcurves are rebuilt.  A query starts from
the exact distances on the first grid row and column and sweeps the blocks by
anti-diagonals; each block turns the values on its sources into the values on
its sinks with one SMAWK min-plus pass.

Exact curves run on integers (see ``encoding``); the sweep is one numba call
for int64/float64 data and the same code in plain Python for big integers.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numba
import numpy as np
from numba import njit
from numba.typed import List as TypedList

from . import monge
from .encoding import INT_LIMIT, Encoding, choose, distance_bound, max_abs, structure_growth
from .errors import EmptyCurveError, MongeViolation, RebuildRequired
from .metric import Curve, CurveEdit, Metric, check_pair, edit_point
from .oracle import grid_table
from .partition import (ChangeReport, PartitionConfig, RebuildScheduler, init_partition,
                        initial_sizes, partition_update, scheduler_step)


def debug_checks() -> bool:
    return os.environ.get("DTW_DEBUG_CHECKS", "") not in ("", "0")


@njit(cache=True)
def _sweep(rlo, rhi, clo, chi, slot, tables, Ws, Hs, g_row, g_col, smawk, trace, seen, check, ctol):
    Ka = rlo.shape[0]
    Kb = clo.shape[0]
    toff = np.zeros(Kb + 1, np.int64)
    for b in range(Kb):
        toff[b + 1] = toff[b] + chi[b] - clo[b] + 1
    loff = np.zeros(Ka + 1, np.int64)
    for a in range(Ka):
        loff[a + 1] = loff[a] + rhi[a] - rlo[a] + 1
    top = np.empty(toff[Kb], g_row.dtype)
    left = np.empty(loff[Ka], g_row.dtype)
    maxn = 1
    for b in range(Kb):
        for j in range(clo[b], chi[b] + 1):
            top[toff[b] + j - clo[b]] = g_row[j]
    for a in range(Ka):
        for i in range(rlo[a], rhi[a] + 1):
            left[loff[a] + i - rlo[a]] = g_col[i]
    maxN = 1
    for a in range(Ka):
        if rhi[a] - rlo[a] + 1 > maxN:
            maxN = rhi[a] - rlo[a] + 1
    maxM = 1
    for b in range(Kb):
        if chi[b] - clo[b] + 1 > maxM:
            maxM = chi[b] - clo[b] + 1
    maxn = maxN + maxM - 1
    x = np.empty(maxn, g_row.dtype)
    y = np.empty(maxn, g_row.dtype)
    arg = np.empty(maxn, np.int64)
    rows_buf = np.empty(3 * maxn + 2, np.int64)
    lev_off = np.empty(3 * 70, np.int64)
    conflicts = 0
    last = g_row[0]
    for d in range(Ka + Kb - 1):
        a0 = d - Kb + 1
        if a0 < 0:
            a0 = 0
        a1 = d
        if a1 > Ka - 1:
            a1 = Ka - 1
        for a in range(a0, a1 + 1):
            b = d - a
            N = rhi[a] - rlo[a] + 1
            M = chi[b] - clo[b] + 1
            ns = N + M - 1
            k = slot[a, b]
            T = tables[k]
            W = Ws[k]
            for q in range(N):
                x[q] = left[loff[a] + N - 1 - q]
            for q in range(1, M):
                x[N - 1 + q] = top[toff[b] + q]
            xmax = x[0]
            for q in range(1, ns):
                if x[q] > xmax:
                    xmax = x[q]
            # stored tables already carry headroom Hs[k] over the block weight
            Wp = W + xmax + 1
            smawk(x[:ns], T, W, Wp, xmax > Hs[k], y[:ns], arg[:ns], rows_buf, lev_off)
            for q in range(M):
                top[toff[b] + q] = y[q]
            for q in range(M - 1, ns):
                r = N + M - 2 - q if q >= M else N - 1
                left[loff[a] + r] = y[q]
            if check:
                for q in range(ns):
                    if q < M:
                        gi = rhi[a]
                        gj = clo[b] + q
                    else:
                        gi = rlo[a] + N + M - 2 - q
                        gj = chi[b]
                    if seen[gi, gj]:
                        # a block's top-right corner is source and sink; float
                        # sums may reach it in a different order
                        if trace[gi, gj] != y[q] and (
                                ctol == 0 or abs(trace[gi, gj] - y[q]) > ctol * max(1.0, abs(y[q]))):
                            conflicts += 1
                    else:
                        seen[gi, gj] = True
                        trace[gi, gj] = y[q]
            last = y[M - 1]
    return last, conflicts


_NB_TYPES = {np.dtype(np.int64): numba.types.int64, np.dtype(np.float64): numba.types.float64}


class _TableStore:
    """Slot storage for block tables, numba-visible for native dtypes."""

    def __init__(self, dtype):
        self.dtype = np.dtype(dtype) if dtype is not object else np.dtype(object)
        self.native = self.dtype != np.dtype(object)
        if self.native:
            self.tables = TypedList.empty_list(numba.types.Array(_NB_TYPES[self.dtype], 2, "C"))
            self._blank = np.zeros((1, 1), self.dtype)
        else:
            self.tables = []
            self._blank = np.zeros((1, 1), dtype=object)
        self.W = np.zeros(16, dtype=self.dtype)
        self.H = np.zeros(16, dtype=self.dtype)
        self.free = []
        self.sizes = []
        self.entries = 0
        self.live = 0

    def put(self, table, W, H) -> int:
        if self.free:
            k = self.free.pop()
            self.tables[k] = table
            self.sizes[k] = table.size
        else:
            k = len(self.sizes)
            self.tables.append(table)
            self.sizes.append(table.size)
            if k >= len(self.W):
                grown = np.zeros((2, 2 * len(self.W)), dtype=self.dtype)
                grown[0, :len(self.W)] = self.W
                grown[1, :len(self.W)] = self.H
                self.W = np.ascontiguousarray(grown[0])
                self.H = np.ascontiguousarray(grown[1])
        self.W[k] = W
        self.H[k] = H
        self.entries += table.size
        self.live += 1
        return k

    def drop(self, k: int) -> None:
        self.entries -= self.sizes[k]
        self.sizes[k] = 0
        self.tables[k] = self._blank
        self.free.append(k)
        self.live -= 1


class BlockGrid:
    """The block tables of one partition pair, plus the curves they describe.

    This is one complete copy of the structure; ``DynamicDtw`` owns one (or
    two under the deamortized schedule).
    """

    def __init__(self, P: list, Q: list, metric: Metric, mode: str, beta: float,
                 method: str = "divide", strict: bool = True, build: bool = True):
        self.metric = metric
        self.mode = mode
        self.beta = beta
        self.method = method
        self.strict = strict
        self.P = list(P)
        self.Q = list(Q)
        self._next_id = 0
        self.Pid = self._fresh(len(self.P))
        self.Qid = self._fresh(len(self.Q))
        self.rebuilds = 0
        self.blocks_built = 0
        if build:
            for _ in self.build_steps():
                pass

    # -- bookkeeping ------------------------------------------------------

    def _fresh(self, k: int) -> list:
        ids = list(range(self._next_id, self._next_id + k))
        self._next_id += k
        return ids

    @property
    def n(self):
        return len(self.P)

    @property
    def m(self):
        return len(self.Q)

    def snapshot(self):
        return list(self.P), list(self.Q)

    def _encode(self):
        self.enc = choose(self.mode, [self.P, self.Q], self.metric,
                          structure_growth(self.n, self.m))
        self.Pc = self.enc.array(self.P)
        self.Qc = self.enc.array(self.Q)
        scaled = max(max_abs(self.P), max_abs(self.Q)) * self.enc.scale if self.enc.exact else 0
        self._dist_bound = distance_bound(self.metric, len(self.P[0]), scaled) if self.enc.exact else 0

    def _still_native(self, point) -> bool:
        if not self.enc.exact:
            return True
        if not self.enc.fits(point):
            return False
        if not self.enc.native:
            return True
        scaled = max_abs([point]) * self.enc.scale
        self._dist_bound = max(self._dist_bound, distance_bound(self.metric, len(point), scaled))
        return (self._dist_bound + 1) * structure_growth(self.n + 1, self.m + 1) < INT_LIMIT

    @staticmethod
    def _spans(part) -> tuple:
        cuts = part.cuts()
        hi = np.array(cuts[1:], dtype=np.int64) - 1
        lo = np.array([0] + cuts[1:-1], dtype=np.int64) - 1
        lo[0] = 0
        return lo, hi

    def _keys(self, side: str) -> list:
        ids = self.Pid if side == "P" else self.Qid
        lo, hi = self.rspan if side == "P" else self.cspan
        return [tuple(ids[a:b + 1]) for a, b in zip(lo.tolist(), hi.tolist())]

    # -- building ---------------------------------------------------------

    def _block(self, om):
        table, W = monge.boundary_table(np.ascontiguousarray(om), self.method, self.headroom)
        if debug_checks():
            tol = monge.float_tolerance(table) if table.dtype == np.float64 else 0
            monge.check_monge(table, tol)
        self.blocks_built += 1
        # stored sink-major, the layout the sweep's SMAWK scans
        return self.store.put(np.ascontiguousarray(table.T), W, self.headroom)

    def _build_row(self, a: int) -> np.ndarray:
        lo, hi = self.rspan[0][a], self.rspan[1][a]
        strip = self.metric.pairwise(self.Pc[lo:hi + 1], self.Qc)
        clo, chi = self.cspan
        return np.array([self._block(strip[:, clo[b]:chi[b] + 1]) for b in range(len(clo))],
                        dtype=np.int64)

    def _build_col(self, b: int) -> np.ndarray:
        lo, hi = self.cspan[0][b], self.cspan[1][b]
        strip = self.metric.pairwise(self.Pc, self.Qc[lo:hi + 1])
        rlo, rhi = self.rspan
        return np.array([self._block(strip[rlo[a]:rhi[a] + 1, :]) for a in range(len(rlo))],
                        dtype=np.int64)

    def build_steps(self):
        """Full (re)build; yields once per block so the work can be sliced."""
        self._encode()
        m0 = min(self.n, self.m)
        self.cfg = PartitionConfig(self.beta, m0)
        self.parts = {"P": init_partition(self.n, self.cfg, self.strict),
                      "Q": init_partition(self.m, self.cfg, self.strict)}
        self.rspan = self._spans(self.parts["P"])
        self.cspan = self._spans(self.parts["Q"])
        self.store = _TableStore(self.enc.dtype)
        self.headroom = self._headroom()
        Ka, Kb = len(self.rspan[0]), len(self.cspan[0])
        self.slot = np.zeros((Ka, Kb), dtype=np.int64)
        clo, chi = self.cspan
        for a in range(Ka):
            lo, hi = self.rspan[0][a], self.rspan[1][a]
            strip = self.metric.pairwise(self.Pc[lo:hi + 1], self.Qc)
            for b in range(Kb):
                self.slot[a, b] = self._block(strip[:, clo[b]:chi[b] + 1])
                yield
        self.row_keys = self._keys("P")
        self.col_keys = self._keys("Q")
        self.rebuilds += 1

    def _headroom(self):
        """Twice the largest possible wavefront value at rebuild time.

        Queries skip the per-block rescale while the wavefront stays below
        this; edits that push it higher only cost the rescale, never
        correctness.
        """
        if self.enc.exact:
            bound = self._dist_bound
        else:
            maxabs = max(float(np.max(np.abs(self.Pc))), float(np.max(np.abs(self.Qc))))
            bound = distance_bound(self.metric, self.Pc.shape[1], maxabs)
        h = 2 * (self.n + self.m) * bound
        return int(h) if self.enc.exact else float(h)

    @staticmethod
    def work(n: int, m: int, beta: float) -> int:
        cfg = PartitionConfig(beta, min(n, m))
        return len(initial_sizes(n, cfg)) * len(initial_sizes(m, cfg))

    def rebuild(self) -> None:
        for _ in self.build_steps():
            pass

    # -- edits ------------------------------------------------------------

    def apply(self, edit: CurveEdit) -> ChangeReport:
        curve = self.P if edit.side == "P" else self.Q
        point = edit_point(edit, self.mode, len(curve[0]))
        if edit.kind == "delete":
            if not 1 <= edit.index <= len(curve):
                raise IndexError(f"delete index {edit.index} outside 1..{len(curve)}")
            if len(curve) == 1:
                raise EmptyCurveError("deleting the last vertex would empty the curve")
        else:
            hi = len(curve) + 1 if edit.kind == "insert" else len(curve)
            if not 1 <= edit.index <= hi:
                raise IndexError(f"{edit.kind} index {edit.index} outside 1..{hi}")
        renormalize = point is not None and not self._still_native(point)
        self._apply_to_curve(edit, point, arrays=not renormalize)
        old_k = len(self.parts[edit.side])
        try:
            report = partition_update(self.parts[edit.side], edit)
        except RebuildRequired:
            self.rebuild()
            return ChangeReport(0, old_k, len(self.parts[edit.side]), "rebuild")
        if renormalize:
            self.rebuild()
            return ChangeReport(0, old_k, len(self.parts[edit.side]), "rebuild")
        self._refresh(edit.side)
        return report

    def _apply_to_curve(self, edit: CurveEdit, point, arrays: bool = True) -> None:
        k = edit.index - 1
        if edit.side == "P":
            curve, ids, coords = self.P, self.Pid, "Pc"
        else:
            curve, ids, coords = self.Q, self.Qid, "Qc"
        arr = getattr(self, coords)
        if edit.kind == "insert":
            curve.insert(k, point)
            ids.insert(k, self._fresh(1)[0])
            if not arrays:
                return
            row = self.enc.array([point])
            arr = np.concatenate([arr[:k], row, arr[k:]])
        elif edit.kind == "delete":
            del curve[k]
            del ids[k]
            if not arrays:
                return
            arr = np.concatenate([arr[:k], arr[k + 1:]])
        else:
            curve[k] = point
            ids[k] = self._fresh(1)[0]
            if not arrays:
                return
            arr = arr.copy()
            arr[k] = self.enc.array([point])[0]
        setattr(self, coords, arr)

    def _refresh(self, side: str) -> None:
        """Rebuild exactly the block rows/columns whose vertex content changed."""
        part = self.parts[side]
        if side == "P":
            old_keys = self.row_keys
            self.rspan = self._spans(part)
            new_keys = self._keys("P")
        else:
            old_keys = self.col_keys
            self.cspan = self._spans(part)
            new_keys = self._keys("Q")
        where = {key: idx for idx, key in enumerate(old_keys)}
        keep = [where.get(key, -1) for key in new_keys]
        reused = {k for k in keep if k >= 0}
        slot = self.slot if side == "P" else self.slot.T
        for k in range(len(old_keys)):
            if k not in reused:
                for s in slot[k].tolist():
                    self.store.drop(s)
        rows = []
        for a, k in enumerate(keep):
            if k >= 0:
                rows.append(slot[k])
            else:
                rows.append(self._build_row(a) if side == "P" else self._build_col(a))
        stacked = np.stack(rows) if rows else np.zeros((0, slot.shape[1]), np.int64)
        self.slot = stacked if side == "P" else np.ascontiguousarray(stacked.T)
        if side == "P":
            self.row_keys = new_keys
        else:
            self.col_keys = new_keys

    # -- query ------------------------------------------------------------

    def sweep(self, check: bool = False):
        """Raw sweep result (encoded units); with ``check`` also the written
        values per grid vertex and the number of shared-vertex disagreements."""
        g_row = np.cumsum(self.metric.pairwise(self.Pc[:1], self.Qc)[0])
        g_col = np.cumsum(self.metric.pairwise(self.Pc, self.Qc[:1])[:, 0])
        dtype = self.store.dtype
        g_row = np.ascontiguousarray(g_row.astype(dtype))
        g_col = np.ascontiguousarray(g_col.astype(dtype))
        if check:
            trace = np.zeros((self.n, self.m), dtype=dtype)
            seen = np.zeros((self.n, self.m), dtype=np.bool_)
        else:
            trace = np.zeros((1, 1), dtype=dtype)
            seen = np.zeros((1, 1), dtype=np.bool_)
        rlo, rhi = self.rspan
        clo, chi = self.cspan
        if self.store.native:
            fn, smawk = _sweep, monge._smawk_minplus
        else:
            fn, smawk = _sweep.py_func, monge._smawk_minplus.py_func
        value, conflicts = fn(rlo, rhi, clo, chi, self.slot, self.store.tables, self.store.W,
                              self.store.H, g_row, g_col, smawk, trace, seen, check,
                              0.0 if self.enc.exact else 1e-9 * (self.n + self.m))
        if check:
            trace[0, :] = g_row
            trace[:, 0] = g_col
            seen[0, :] = True
            seen[:, 0] = True
        return value, conflicts, trace, seen

    def value(self):
        value, _, _, _ = self.sweep()
        return self.enc.decode(value)

    # -- inspection -------------------------------------------------------

    @property
    def shape(self) -> tuple:
        return self.slot.shape

    def stored_entries(self) -> int:
        return self.store.entries

    def expected_entries(self) -> int:
        """Entries the current blocks need: (N + M - 1)^2 per block."""
        N = self.rspan[1] - self.rspan[0] + 1
        M = self.cspan[1] - self.cspan[0] + 1
        return int(((N[:, None] + M[None, :] - 1) ** 2).sum())

    def block_table(self, a: int, b: int):
        k = self.slot[a, b]
        return self.store.tables[k].T, self.store.W[k]

    def fresh_block(self, a: int, b: int):
        lo, hi = self.rspan[0][a], self.rspan[1][a]
        c0, c1 = self.cspan[0][b], self.cspan[1][b]
        om = self.metric.pairwise(self.Pc[lo:hi + 1], self.Qc[c0:c1 + 1])
        return monge.boundary_table(np.ascontiguousarray(om), self.method, self.headroom)


class DynamicDtw:
    """DTW(P, Q) maintained under insertions, deletions and substitutions.

    ``beta`` in [0, 1/2] trades update time (about n m^beta) against query
    time (about n m^(1-beta)).  By default the whole structure is rebuilt
    after min(n, m)/2 updates; with ``deamortized=True`` the rebuild runs in
    slices on a second copy instead.
    """

    def __init__(self, P: Curve, Q: Curve, metric="L1", beta: float = 0.5,
                 deamortized: bool = False, method: str = "divide"):
        metric = Metric.parse(metric)
        check_pair(P, Q, metric)
        if not 0 <= beta <= 0.5:
            raise ValueError(f"beta must lie in [0, 1/2], got {beta}")
        self.metric = metric
        self.mode = P.mode
        self.beta = beta
        self.method = method
        self.deamortized = deamortized
        grid = BlockGrid(P.points, Q.points, metric, self.mode, beta, method,
                         strict=not deamortized)
        if deamortized:
            self.scheduler = RebuildScheduler(grid, self._builder, self._work)
        else:
            self.scheduler = None
            self._grid = grid

    def _builder(self, snap):
        P, Q = snap
        grid = BlockGrid(P, Q, self.metric, self.mode, self.beta, self.method,
                         strict=False, build=False)
        yield from grid.build_steps()
        return grid

    def _work(self, snap) -> int:
        P, Q = snap
        return BlockGrid.work(len(P), len(Q), self.beta)

    @property
    def grid(self) -> BlockGrid:
        return self.scheduler.active if self.scheduler is not None else self._grid

    @property
    def P(self) -> Curve:
        return Curve(tuple(self.grid.P), self.mode)

    @property
    def Q(self) -> Curve:
        return Curve(tuple(self.grid.Q), self.mode)

    def update(self, edit: CurveEdit) -> ChangeReport:
        curve = self.grid.P if edit.side == "P" else self.grid.Q
        if self.scheduler is not None:
            # validate before the edit reaches either copy
            edit_point(edit, self.mode, len(curve[0]))
            if edit.kind == "delete" and len(curve) == 1:
                raise EmptyCurveError("deleting the last vertex would empty the curve")
            hi = len(curve) + (1 if edit.kind == "insert" else 0)
            if not 1 <= edit.index <= hi:
                raise IndexError(f"{edit.kind} index {edit.index} outside 1..{hi}")
            return scheduler_step(self.scheduler, edit)
        return self._grid.apply(edit)

    def query(self):
        grid = self.grid
        if debug_checks():
            return self._checked_query(grid)
        return grid.value()

    def _checked_query(self, grid: BlockGrid):
        value, conflicts, trace, seen = grid.sweep(check=True)
        if conflicts:
            raise AssertionError(f"{conflicts} shared boundary vertices got different values")
        truth = grid_table(self.P, self.Q, self.metric)
        got = grid.enc.decode_array(trace)
        mask = seen
        if grid.enc.exact:
            bad = [(i, j) for i, j in zip(*np.nonzero(mask)) if got[i, j] != truth[i, j]]
        else:
            tol = 1e-9 * (grid.n + grid.m) * np.maximum(1.0, np.abs(truth.astype(float)))
            bad = list(zip(*np.nonzero(mask & (np.abs(got.astype(float) - truth.astype(float)) > tol))))
        if bad:
            raise AssertionError(f"wavefront differs from the oracle at {bad[:5]}")
        return grid.enc.decode(value)

    def stored_entries(self) -> int:
        total = self.grid.stored_entries()
        if self.scheduler is not None and self.scheduler.spare is not None:
            total += self.scheduler.spare.stored_entries()
        return total

    @property
    def shape(self) -> tuple:
        return self.grid.shape

    def verify_blocks(self) -> None:
        """Every stored table equals a fresh build; every table is Monge."""
        grid = self.grid
        Ka, Kb = grid.shape
        for a in range(Ka):
            for b in range(Kb):
                table, W = grid.block_table(a, b)
                fresh, W2 = grid.fresh_block(a, b)
                if W != W2 or not np.array_equal(table, fresh):
                    raise AssertionError(f"block ({a}, {b}) is stale")
                tol = monge.float_tolerance(table) if table.dtype == np.float64 else 0
                if not monge.is_monge(table, tol):
                    raise MongeViolation(f"block ({a}, {b}) is not Monge")


def new(P: Curve, Q: Curve, metric="L1", beta: float = 0.5, **kw) -> DynamicDtw:
    return DynamicDtw(P, Q, metric, beta, **kw)


def update(ds: DynamicDtw, edit: CurveEdit) -> ChangeReport:
    return ds.update(edit)


def query(ds: DynamicDtw):
    return ds.query()
