"""Per-block boundary distance tables, Monge checks, SMAWK and min-plus.

A block is the N x M sub-grid spanned by a subcurve of P (rows, index i grows
downward) and a subcurve of Q (columns, index j grows to the right).  Paths
run down/right.  Sources are the left column read bottom to top followed by
the top row read left to right; sinks are the bottom row left to right
followed by the right column bottom to top.  Both lists have N + M - 1
entries, start at the bottom-left corner and end at the top-right corner.

The alignment graph has an edge into every vertex v from each of its up to
three predecessors, and that edge weighs omega(v) = d(p_i, q_j).  Adding a
reverse arc of cost W (> total edge weight) for every edge makes every
boundary pair connected; the resulting table is Monge, and a value is a true
distance exactly when it is below W.

Two builders produce the same table.  ``dijkstra`` runs Dijkstra from every
source on the augmented graph and is the reference.  ``divide`` (default)
computes all forward source-to-sink distances by splitting the longer side
and combining halves with a monotone-argmin min-plus product, and fills the
pairs without a forward path in closed form: such a pair is either
left column -> right column (target higher) or top row -> bottom row (target
further left), and its optimum takes exactly as many reverse arcs as the
row (column) difference, all vertical (horizontal), plus the cheapest
staircase that pays only for the cells it enters moving right (down).
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from llvmlite import ir
from numba import njit, types
from numba.core import cgutils
from numba.extending import intrinsic, overload

from .encoding import Encoding, choose, structure_growth
from .errors import EmptyCurveError, MongeViolation
from .metric import EXACT, Curve, Metric, check_pair


@intrinsic
def _prefetch_item(typingctx, arr, i, j):
    def codegen(context, builder, sig, args):
        aty = sig.args[0]
        a = context.make_array(aty)(context, builder, args[0])
        ptr = cgutils.get_item_pointer(context, builder, aty, a, [args[1], args[2]],
                                       wraparound=False)
        i8p = ir.IntType(8).as_pointer()
        i32 = ir.IntType(32)
        fnty = ir.FunctionType(ir.VoidType(), [i8p, i32, i32, i32])
        fn = cgutils.get_or_insert_function(builder.module, fnty, "llvm.prefetch.p0i8")
        # read, high locality, data cache
        builder.call(fn, [builder.bitcast(ptr, i8p), ir.Constant(i32, 0),
                          ir.Constant(i32, 3), ir.Constant(i32, 1)])
        return context.get_dummy_value()
    return types.void(arr, i, j), codegen


def prefetch(arr, i, j):
    """Cache hint for arr[i, j]; a no-op outside compiled code."""


@overload(prefetch)
def _prefetch_ol(arr, i, j):
    if isinstance(arr, types.Array) and arr.ndim == 2 and arr.dtype != types.pyobject:
        return lambda arr, i, j: _prefetch_item(arr, i, j)
    return lambda arr, i, j: None

INF = math.inf

# blocks with at most this many vertices are built by one fused kernel
SMALL_BLOCK = 144
# leaves of the divide-and-conquer recursion
LEAF_BLOCK = 256


# ---------------------------------------------------------------------------
# index helpers


def source_coords(N: int, M: int):
    """0-based (row, col) of every source, in order."""
    return [(N - 1 - k, 0) for k in range(N)] + [(0, c) for c in range(1, M)]


def sink_coords(N: int, M: int):
    return [(N - 1, c) for c in range(M)] + [(r, M - 1) for r in range(N - 2, -1, -1)]


@dataclass(frozen=True)
class BoundarySequences:
    """Ordered sources S and sinks T of an N x M block (1-based local pairs)."""

    N: int
    M: int
    S: tuple = field(init=False)
    T: tuple = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "S", tuple((i + 1, j + 1) for i, j in source_coords(self.N, self.M)))
        object.__setattr__(self, "T", tuple((i + 1, j + 1) for i, j in sink_coords(self.N, self.M)))


@lru_cache(maxsize=512)
def _assembly_index(N: int, M: int):
    S = np.array(source_coords(N, M), dtype=np.int64)
    T = np.array(sink_coords(N, M), dtype=np.int64)
    si = S[:, 0][:, None]
    sj = S[:, 1][:, None]
    ti = T[:, 0][None, :]
    tj = T[:, 1][None, :]
    up = (sj == 0) & (tj == M - 1) & (ti < si)
    left = (si == 0) & (ti == N - 1) & (tj < sj)
    ua, ub = np.nonzero(up)
    la, lb = np.nonzero(left)
    up_k = (si - ti)[up]
    left_k = (sj - tj)[left]
    # positions in the reflected-grid tables
    up_src = S[ua, 0]
    up_dst = M - 1 + T[ub, 0]
    left_src = N + M - 2 - S[la, 1]
    left_dst = M - 1 - T[lb, 1]
    return (ua, ub, up_k, up_src, up_dst), (la, lb, left_k, left_src, left_dst)


# ---------------------------------------------------------------------------
# kernels (each also runs as plain Python on object arrays through .py_func)


@njit(cache=True)
def _dist_base(wd, wr, wg, diag, out):
    """Forward source-to-sink distances of a small grid, one DP per source.

    wd[i, j]: cost of entering (i, j) from above; wr[i, j]: from the left;
    wg[i, j]: diagonally (only if ``diag``).  Unreachable pairs get 0.
    """
    N, M = wd.shape
    ns = N + M - 1
    zero = wd[0, 0] - wd[0, 0]
    dp = np.empty((N, M), wd.dtype)
    for a in range(ns):
        if a < N:
            si = N - 1 - a
            sj = 0
        else:
            si = 0
            sj = a - N + 1
        dp[si, sj] = zero
        for j in range(sj + 1, M):
            dp[si, j] = dp[si, j - 1] + wr[si, j]
        for i in range(si + 1, N):
            dp[i, sj] = dp[i - 1, sj] + wd[i, sj]
            for j in range(sj + 1, M):
                v = dp[i - 1, j] + wd[i, j]
                u = dp[i, j - 1] + wr[i, j]
                if u < v:
                    v = u
                if diag:
                    u = dp[i - 1, j - 1] + wg[i, j]
                    if u < v:
                        v = u
                dp[i, j] = v
        for b in range(ns):
            if b < M:
                ti = N - 1
                tj = b
            else:
                ti = N + M - 2 - b
                tj = M - 1
            if ti >= si and tj >= sj:
                out[a, b] = dp[ti, tj]
            else:
                out[a, b] = zero


@njit(cache=True)
def _combine_rows(FA, FB, FBt, N, M, h, out):
    """Glue the tables of the row ranges [0, h] (A) and [h, N-1] (B).

    Paths from A's sources to B's sinks cross row h at some column z; for a
    fixed source the best z is monotone in the sink order, which a
    divide-and-conquer over sinks exploits.
    """
    nb_only = N - 1 - h
    ntb = N + M - h - 1
    ns = N + M - 1
    zero = FA[0, 0] - FA[0, 0]
    stack = np.empty(4 * (2 * ns + 8), np.int64)
    for k in range(nb_only):
        for t in range(ntb):
            out[k, t] = FB[k, t]
        for t in range(ntb, ns):
            out[k, t] = zero
    for kp in range(h + M):
        k = nb_only + kp
        for t in range(ntb, ns):
            out[k, t] = FA[kp, M + t - ntb]
        lo = 0 if kp <= h else kp - h
        for t in range(lo):
            out[k, t] = zero
        top = 0
        stack[0] = lo
        stack[1] = ntb - 1
        stack[2] = lo
        stack[3] = M - 1
        top = 4
        while top > 0:
            top -= 4
            tlo = stack[top]
            thi = stack[top + 1]
            zlo = stack[top + 2]
            zhi = stack[top + 3]
            if tlo > thi:
                continue
            tm = (tlo + thi) // 2
            zh = zhi
            if tm < M and tm < zh:
                zh = tm
            bz = zlo
            best = FA[kp, zlo] + FBt[tm, nb_only + zlo]
            for z in range(zlo + 1, zh + 1):
                v = FA[kp, z] + FBt[tm, nb_only + z]
                if v < best:
                    best = v
                    bz = z
            out[k, tm] = best
            stack[top] = tlo
            stack[top + 1] = tm - 1
            stack[top + 2] = zlo
            stack[top + 3] = bz
            stack[top + 4] = tm + 1
            stack[top + 5] = thi
            stack[top + 6] = bz
            stack[top + 7] = zhi
            top += 8


@njit(cache=True)
def _small_table(om, W, out):
    """Whole augmented table of a small block in one pass."""
    N, M = om.shape
    ns = N + M - 1
    zero = om[0, 0] - om[0, 0]
    dp = np.empty((N, M), om.dtype)
    # forward pairs
    for a in range(ns):
        if a < N:
            si = N - 1 - a
            sj = 0
        else:
            si = 0
            sj = a - N + 1
        dp[si, sj] = zero
        for j in range(sj + 1, M):
            dp[si, j] = dp[si, j - 1] + om[si, j]
        for i in range(si + 1, N):
            dp[i, sj] = dp[i - 1, sj] + om[i, sj]
            for j in range(sj + 1, M):
                v = dp[i - 1, j]
                if dp[i, j - 1] < v:
                    v = dp[i, j - 1]
                if dp[i - 1, j - 1] < v:
                    v = dp[i - 1, j - 1]
                dp[i, j] = v + om[i, j]
        for b in range(ns):
            if b < M:
                ti = N - 1
                tj = b
            else:
                ti = N + M - 2 - b
                tj = M - 1
            if ti >= si and tj >= sj:
                out[a, b] = dp[ti, tj]
    # left column -> right column, target higher: climb for free, pay moving right
    row = np.empty(M, om.dtype)
    for si in range(1, N):
        row[0] = zero
        for j in range(1, M):
            row[j] = row[j - 1] + om[si, j]
        for r in range(si - 1, -1, -1):
            for j in range(1, M):
                v = row[j - 1] + om[r, j]
                if v < row[j]:
                    row[j] = v
            out[N - 1 - si, N + M - 2 - r] = (si - r) * W + row[M - 1]
    # top row -> bottom row, target further left: step left for free, pay moving down
    col = np.empty(N, om.dtype)
    for sj in range(1, M):
        col[0] = zero
        for i in range(1, N):
            col[i] = col[i - 1] + om[i, sj]
        for c in range(sj - 1, -1, -1):
            for i in range(1, N):
                v = col[i - 1] + om[i, c]
                if v < col[i]:
                    col[i] = v
            out[N - 1 + sj, c] = (sj - c) * W + col[N - 1]


@njit(cache=True)
def _smawk_minplus(x, tt, W, Wp, rescale, y, arg, rows_buf, lev_off):
    """Column minima of A[s, t] = x[s] + table'[s, t] (rescaled to W').

    ``tt`` is the table stored sink-major (tt[t, s] = table[s, t]) so the
    scans over sources for one sink are contiguous.
    Without ``rescale`` the table is used as stored (the caller knows W
    already exceeds every x by the block weight).  Iterative SMAWK: the
    reduce phase runs down the levels (odd columns of the previous level),
    then minima are interpolated back up.  Ties go to the smallest row.
    rows_buf needs ns + 2 * nt slots, lev_off 3 * 70.
    """
    ns = x.shape[0]
    nt = tt.shape[0]
    dW = Wp - W
    vals = np.empty(nt, x.dtype)
    vals_ok = np.zeros(nt, np.bool_)
    # level 0 rows: all of them
    cnt = nt
    start = 0
    step = 1
    lev = 0
    in_off = 0
    in_len = ns
    for s in range(ns):
        rows_buf[s] = s
    pos = ns
    while cnt > 0:
        # reduce rows_buf[in_off:in_off+in_len] against this level's columns
        out_off = pos
        sz = 0
        if in_len <= cnt:
            # nothing to eliminate: every row may still own a column
            for q in range(in_len):
                rows_buf[out_off + q] = rows_buf[in_off + q]
            sz = in_len
        else:
            # vals[k] caches stack entry k evaluated at its own column
            for q in range(in_len):
                r = rows_buf[in_off + q]
                while sz > 0:
                    c = start + (sz - 1) * step
                    if vals_ok[sz - 1]:
                        v0 = vals[sz - 1]
                    else:
                        r0 = rows_buf[out_off + sz - 1]
                        e0 = tt[c, r0]
                        v0 = x[r0] + e0
                        if rescale:
                            v0 += dW * (e0 // W)
                        vals[sz - 1] = v0
                        vals_ok[sz - 1] = True
                    e1 = tt[c, r]
                    v1 = x[r] + e1
                    if rescale:
                        v1 += dW * (e1 // W)
                    if v0 > v1:
                        sz -= 1
                    else:
                        break
                if sz < cnt:
                    rows_buf[out_off + sz] = r
                    vals_ok[sz] = False
                    sz += 1
                    if sz < cnt:
                        # the next candidate is compared here, one column on
                        prefetch(tt, start + sz * step, r)
        lev_off[3 * lev] = out_off
        lev_off[3 * lev + 1] = sz
        lev_off[3 * lev + 2] = cnt
        pos = out_off + sz
        in_off = out_off
        in_len = sz
        start = start + step
        step = step * 2
        cnt = cnt // 2
        lev += 1
    # interpolate from the deepest level up
    for L in range(lev - 1, -1, -1):
        off = lev_off[3 * L]
        nr = lev_off[3 * L + 1]
        cnt = lev_off[3 * L + 2]
        step = 1 << L
        start = step - 1
        # every scan range is known now: issue the loads before walking them
        for cpos in range(0, cnt, 2):
            c = start + cpos * step
            r0 = rows_buf[off] if cpos == 0 else arg[c - step]
            prefetch(tt, c, r0)
            prefetch(tt, c, min(r0 + 8, ns - 1))
        r = 0
        for cpos in range(0, cnt, 2):
            c = start + cpos * step
            if cpos == cnt - 1:
                last = rows_buf[off + nr - 1]
            else:
                last = arg[start + (cpos + 1) * step]
            row = rows_buf[off + r]
            e = tt[c, row]
            best = x[row] + e
            if rescale:
                best += dW * (e // W)
            barg = row
            while row != last:
                r += 1
                row = rows_buf[off + r]
                e = tt[c, row]
                v = x[row] + e
                if rescale:
                    v += dW * (e // W)
                if v < best:
                    best = v
                    barg = row
            y[c] = best
            arg[c] = barg


# ---------------------------------------------------------------------------
# divide and conquer over the grid


def _kernel(fn, arr):
    return fn if arr.dtype != object else fn.py_func


def _empty(n, dtype):
    return np.empty((n, n), dtype=dtype)


def dist_matrix(wd, wr, wg, diag: bool):
    """Forward distances from every source to every sink (unreachable -> 0)."""
    N, M = wd.shape
    ns = N + M - 1
    if N * M <= LEAF_BLOCK or min(N, M) <= 2:
        out = _empty(ns, wd.dtype)
        _kernel(_dist_base, wd)(wd, wr, wg, diag, out)
        return out
    if N >= M:
        h = (N - 1) // 2
        FA = dist_matrix(wd[:h + 1], wr[:h + 1], wg[:h + 1], diag)
        FB = dist_matrix(wd[h:], wr[h:], wg[h:], diag)
        out = _empty(ns, wd.dtype)
        FBt = np.ascontiguousarray(FB.T)
        _kernel(_combine_rows, wd)(FA, FB, FBt, N, M, h, out)
        return out
    F = dist_matrix(np.ascontiguousarray(wr.T), np.ascontiguousarray(wd.T),
                    np.ascontiguousarray(wg.T), diag)
    return np.ascontiguousarray(F[::-1, ::-1])


def weight_total(om: np.ndarray):
    """Sum over all edges of the weight of the vertex entered."""
    N, M = om.shape
    total = om[1:, 1:].sum() * 3 + om[0, 1:].sum() + om[1:, 0].sum()
    if om.dtype == object:
        return int(total) if N * M > 1 else 0
    return total.item() if hasattr(total, "item") else total


def augmentation_weight(om: np.ndarray, headroom=0):
    """w(G) + 1 (+ headroom); a power of two in float mode so floor(v / W) is exact."""
    total = weight_total(om) + headroom
    if om.dtype == np.float64:
        w = float(total) + 1.0
        m, e = math.frexp(w)
        return w if m == 0.5 else math.ldexp(1.0, e)
    return total + 1


def _coerce(W, dtype):
    if dtype == np.int64:
        return np.int64(W)
    if dtype == np.float64:
        return np.float64(W)
    return W


def boundary_table(om: np.ndarray, method: str = "divide", headroom=0):
    """Augmented boundary table and its threshold W for vertex weights ``om``.

    With ``headroom`` H > 0 the threshold is raised to W_H >= w(G) + 1 + H by
    the rescale D^{+W_H} = D^{+W} + (W_H - W) floor(D^{+W} / W); min-plus
    against any vector with entries <= H then needs no further rescaling.
    """
    table, W = _boundary_table(om, method)
    if not headroom:
        return table, W
    WH = _coerce(augmentation_weight(om, headroom), om.dtype)
    if table.dtype == object:
        table = table + (WH - W) * (table // W)
    else:
        table += (WH - W) * (table // W)
    return table, WH


def _boundary_table(om: np.ndarray, method: str):
    N, M = om.shape
    W = _coerce(augmentation_weight(om), om.dtype)
    if method == "dijkstra":
        return dijkstra_table(om, W), W
    ns = N + M - 1
    if method == "small" or (method == "divide" and N * M <= SMALL_BLOCK):
        out = _empty(ns, om.dtype)
        _kernel(_small_table, om)(om, W, out)
        return out, W
    if method not in ("divide", "split"):
        raise ValueError(f"unknown build method {method!r}")
    om = np.ascontiguousarray(om)
    zeros = np.zeros_like(om) if om.dtype != object else np.full(om.shape, 0, dtype=object)
    table = dist_matrix(om, om, om, True)
    (ua, ub, uk, us, ut), (la, lb, lk, ls, lt) = _assembly_index(N, M)
    if om.dtype == object:
        uk = uk.astype(object)
        lk = lk.astype(object)
    if len(ua):
        climb = dist_matrix(zeros, np.ascontiguousarray(om[::-1]), zeros, False)
        table[ua, ub] = uk * W + climb[us, ut]
    if len(la):
        slide = dist_matrix(np.ascontiguousarray(om[:, ::-1]), zeros, zeros, False)
        table[la, lb] = lk * W + slide[ls, lt]
    return table, W


def dijkstra_table(om: np.ndarray, W):
    """Reference build: Dijkstra from every source on the augmented graph."""
    N, M = om.shape
    adj = {}
    for i in range(N):
        for j in range(M):
            adj[(i, j)] = []
    for i in range(N):
        for j in range(M):
            for di, dj in ((1, 0), (0, 1), (1, 1)):
                a, b = i + di, j + dj
                if a < N and b < M:
                    adj[(i, j)].append(((a, b), om[a, b]))
                    adj[(a, b)].append(((i, j), W))
    S = source_coords(N, M)
    T = sink_coords(N, M)
    out = np.empty((len(S), len(T)), dtype=om.dtype)
    zero = om[0, 0] - om[0, 0]
    for a, s in enumerate(S):
        dist = {s: zero}
        heap = [(zero, 0, s)]
        tick = 1
        done = set()
        while heap:
            d, _, v = heapq.heappop(heap)
            if v in done:
                continue
            done.add(v)
            for u, w in adj[v]:
                nd = d + w
                if u not in dist or nd < dist[u]:
                    dist[u] = nd
                    heapq.heappush(heap, (nd, tick, u))
                    tick += 1
        for b, t in enumerate(T):
            out[a, b] = dist[t]
    return out


# ---------------------------------------------------------------------------
# Monge / staircase checks


def monge_violations(table: np.ndarray, tol=0):
    """Adjacent 2x2 minors with table[i,j]+table[i+1,j+1] > table[i,j+1]+table[i+1,j]+tol."""
    lhs = table[:-1, :-1] + table[1:, 1:]
    rhs = table[:-1, 1:] + table[1:, :-1]
    bad = lhs > rhs + tol
    return np.argwhere(bad)


def is_monge(table: np.ndarray, tol=0) -> bool:
    if table.shape[0] < 2 or table.shape[1] < 2:
        return True
    return len(monge_violations(table, tol)) == 0


def check_monge(table: np.ndarray, tol=0) -> None:
    if not is_monge(table, tol):
        i, j = monge_violations(table, tol)[0]
        raise MongeViolation(f"Monge condition fails at minor ({i}, {j})")


def float_tolerance(table: np.ndarray) -> float:
    return 1e-9 * max(1.0, float(np.max(np.abs(table)))) if table.size else 0.0


# ---------------------------------------------------------------------------
# public block API


@dataclass
class AlignmentGraph:
    """Directed grid of one block; every edge weighs omega of the vertex entered.

    ``omega`` is held in the integer/float units of ``enc`` (exact curves are
    scaled to integers); accessors return true values.
    """

    P_a: Curve
    Q_b: Curve
    metric: Metric
    enc: Encoding
    omega: np.ndarray

    @property
    def dims(self):
        return self.omega.shape

    def vertex_weight(self, i: int, j: int):
        return self.enc.decode(self.omega[i - 1, j - 1])

    def edges(self):
        """All edges as ((i, j), (i', j'), weight) with 1-based local indices."""
        N, M = self.omega.shape
        for i in range(N):
            for j in range(M):
                for di, dj in ((1, 0), (0, 1), (1, 1)):
                    a, b = i + di, j + dj
                    if a < N and b < M:
                        yield (i + 1, j + 1), (a + 1, b + 1), self.enc.decode(self.omega[a, b])

    def total_weight(self):
        return self.enc.decode(weight_total(self.omega))


def build_alignment_graph(P_a: Curve, Q_b: Curve, metric="L1") -> AlignmentGraph:
    metric = Metric.parse(metric)
    if not len(P_a) or not len(Q_b):
        raise EmptyCurveError("both subcurves must be non-empty")
    check_pair(P_a, Q_b, metric)
    enc = choose(P_a.mode, [P_a.points, Q_b.points], metric,
                 structure_growth(len(P_a), len(Q_b)))
    om = metric.pairwise(enc.array(P_a.points), enc.array(Q_b.points))
    return AlignmentGraph(P_a, Q_b, metric, enc, np.ascontiguousarray(om))


@dataclass
class BoundaryDistanceMatrix:
    """Augmented boundary table of one block in encoded units."""

    N: int
    M: int
    W: object
    table: np.ndarray
    enc: Encoding

    @property
    def sequences(self) -> BoundarySequences:
        return BoundarySequences(self.N, self.M)

    def value(self, s: int, t: int):
        """True distance between source s and sink t (0-based positions)."""
        v = self.table[s, t]
        return INF if v >= self.W else self.enc.decode(v)

    def distances(self) -> list:
        return [[self.value(s, t) for t in range(self.table.shape[1])]
                for s in range(self.table.shape[0])]

    def threshold(self):
        return self.enc.decode(self.W)

    def entries(self) -> int:
        return int(self.table.size)


def build_boundary_matrix(g: AlignmentGraph, method: str = "divide") -> BoundaryDistanceMatrix:
    N, M = g.dims
    table, W = boundary_table(g.omega, method)
    return BoundaryDistanceMatrix(N, M, W, table, g.enc)


# ---------------------------------------------------------------------------
# SMAWK and min-plus


def smawk_column_minima(nrows: int, ncols: int, entry):
    """Column minima of an implicit totally monotone matrix.

    ``entry(i, j)`` gives the value at row i, column j (0-based).  Returns a
    list of (argmin row, value) per column; ties go to the smallest row.
    """
    minima = {}

    def solve(rows, cols):
        if not cols:
            return
        stack = []
        for r in rows:
            while stack and entry(stack[-1], cols[len(stack) - 1]) > entry(r, cols[len(stack) - 1]):
                stack.pop()
            if len(stack) != len(cols):
                stack.append(r)
        rows = stack
        solve(rows, cols[1::2])
        k = 0
        for c in range(0, len(cols), 2):
            col = cols[c]
            row = rows[k]
            last = rows[-1] if c == len(cols) - 1 else minima[cols[c + 1]][0]
            best = (entry(row, col), row)
            while row != last:
                k += 1
                row = rows[k]
                v = entry(row, col)
                if v < best[0]:
                    best = (v, row)
            minima[col] = (best[1], best[0])

    if nrows == 0:
        return []
    solve(list(range(nrows)), list(range(ncols)))
    return [minima[c] for c in range(ncols)]


def smawk_scratch(ns: int, nt: int):
    return np.empty(ns + 2 * nt + 2, np.int64), np.empty(3 * 70, np.int64)


def minplus_raw(x: np.ndarray, table: np.ndarray, W):
    """min_s x[s] + table'[s, t] with every x finite; returns (y, argmin, W').

    y[t] >= W' marks a sink that no finite source reaches.
    """
    ns, nt = table.shape
    xmax = x.max()
    Wp = W + xmax + 1
    y = np.empty(nt, dtype=table.dtype)
    arg = np.empty(nt, dtype=np.int64)
    rows_buf, lev_off = smawk_scratch(ns, nt)
    tt = np.ascontiguousarray(table.T)
    _kernel(_smawk_minplus, table)(x, tt, W, Wp, True, y, arg, rows_buf, lev_off)
    return y, arg, Wp


def minplus_apply(x, m: BoundaryDistanceMatrix) -> list:
    """y[t] = min_s x[s] + D[s, t] with true infinities, in O(|S| + |T|).

    ``x`` holds true values (``math.inf`` allowed).  Infinite entries become
    W' = 1 + W + max finite x, the table is rescaled to W', and SMAWK finds
    the column minima; results at or above W' are infinite.
    """
    ns, nt = m.table.shape
    if len(x) != ns:
        raise ValueError(f"x has {len(x)} entries, the block has {ns} sources")
    finite = [v for v in x if not (isinstance(v, float) and math.isinf(v))]
    if not finite:
        return [INF] * nt
    enc = m.enc
    if enc.exact:
        from fractions import Fraction
        vals = [None if (isinstance(v, float) and math.isinf(v)) else Fraction(v) * enc.scale
                for v in x]
        W = int(m.W)
        Wp = W + max(v for v in vals if v is not None) + 1
        xa = np.array([Wp if v is None else v for v in vals], dtype=object)
        table = np.ascontiguousarray(m.table.T).astype(object)
        y = np.empty(nt, dtype=object)
        arg = np.empty(nt, dtype=np.int64)
        rows_buf, lev_off = smawk_scratch(ns, nt)
        _smawk_minplus.py_func(xa, table, W, Wp, True, y, arg, rows_buf, lev_off)
        return [INF if v >= Wp else Fraction(v) / enc.scale for v in y]
    table, W = m.table, m.W
    xmax = max(float(v) for v in finite)
    Wp = float(W) + xmax + 1.0
    xa = np.array([Wp if math.isinf(float(v)) else float(v) for v in x], dtype=np.float64)
    y = np.empty(nt, dtype=np.float64)
    arg = np.empty(nt, dtype=np.int64)
    rows_buf, lev_off = smawk_scratch(ns, nt)
    _smawk_minplus(xa, np.ascontiguousarray(table.T), np.float64(W), np.float64(Wp), True,
                   y, arg, rows_buf, lev_off)
    return [INF if v >= Wp else float(v) for v in y]


def minplus_naive(x, D) -> list:
    """Direct double loop over true distances (``math.inf`` for no path)."""
    ns = len(D)
    nt = len(D[0]) if ns else 0
    out = []
    for t in range(nt):
        best = INF
        for s in range(ns):
            if math.isinf(x[s]) if isinstance(x[s], float) else False:
                continue
            d = D[s][t]
            if isinstance(d, float) and math.isinf(d):
                continue
            v = x[s] + d
            if v < best:
                best = v
        out.append(best)
    return out
