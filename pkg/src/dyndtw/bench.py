"""Timing sweeps for the dynamic structure and the full-recompute baseline.

The host this runs on is shared, and its speed drifts by up to 2x over tens
of seconds.  Trials therefore go round-robin over sizes (trial t of every size
runs before trial t + 1 of any size), so drift hits all sizes alike, and
slopes are fitted on the per-size minimum.  The median fit is reported too.
"""
from __future__ import annotations

import csv
import random
import time
from dataclasses import asdict, dataclass

import numpy as np

from .dynamic import DynamicDtw
from .metric import FLOAT, Curve, CurveEdit
from .oracle import dtw_array

FIELDS = ("n", "m", "beta", "op", "wall_time_ns", "trial", "seed")


@dataclass(frozen=True)
class BenchRecord:
    n: int
    m: int
    beta: float
    op: str
    wall_time_ns: int
    trial: int
    seed: int

    def __post_init__(self):
        if self.wall_time_ns <= 0:
            raise ValueError(f"non-positive time {self.wall_time_ns}")


def _rng(seed: int, n: int, beta: float) -> random.Random:
    return random.Random(f"{seed}/{n}/{beta}")


def random_float_curve(rng: random.Random, n: int) -> Curve:
    return Curve.of([rng.random() for _ in range(n)], FLOAT)


def _edit(rng: random.Random, ds: DynamicDtw, k: int) -> CurveEdit:
    # rotate through the three kinds and both sides so lengths stay put on average
    side = "PQ"[k % 2]
    n = len(ds.P) if side == "P" else len(ds.Q)
    kind = ("insert", "substitute", "delete")[(k // 2) % 3]
    if kind == "delete" and n > 1:
        return CurveEdit.delete(side, rng.randint(1, n))
    if kind == "insert":
        return CurveEdit.insert(side, rng.randint(1, n + 1), (rng.random(),))
    return CurveEdit.substitute(side, rng.randint(1, n), (rng.random(),))


def _timed(fn, *a):
    t = time.perf_counter_ns()
    out = fn(*a)
    return max(1, time.perf_counter_ns() - t), out


def run_bench(sizes, betas, trials: int, seed: int = 0, naive: bool = False, metric="L1",
              progress=None) -> list:
    """Build/update/query records for n = m in ``sizes``; ``naive`` adds full recomputes."""
    sizes = list(sizes)
    if sizes != sorted(sizes) or len(set(sizes)) != len(sizes):
        raise ValueError("sizes must be strictly ascending")
    if trials < 1:
        raise ValueError("need at least one trial")
    out = []
    for beta in betas:
        state = {}
        for n in sizes:
            rng = _rng(seed, n, beta)
            P, Q = random_float_curve(rng, n), random_float_curve(rng, n)
            dt, ds = _timed(DynamicDtw, P, Q, metric, beta)
            out.append(BenchRecord(n, n, beta, "build", dt, 0, seed))
            ds.query()
            X = np.array([p[0] for p in P])[:, None]
            Y = np.array([q[0] for q in Q])[:, None]
            if naive:
                dtw_array(X, Y, metric)
            state[n] = (rng, ds, X, Y)
            if progress:
                progress(f"built n={n} beta={beta} in {dt / 1e9:.2f}s")
        for t in range(trials):
            for n in sizes:
                rng, ds, X, Y = state[n]
                e = _edit(rng, ds, t)
                dt, _ = _timed(ds.update, e)
                out.append(BenchRecord(n, n, beta, "update", dt, t, seed))
                dt, _ = _timed(ds.query)
                out.append(BenchRecord(n, n, beta, "query", dt, t, seed))
                if naive:
                    dt, _ = _timed(dtw_array, X, Y, metric)
                    out.append(BenchRecord(n, n, beta, "naive", dt, t, seed))
        if progress:
            progress(f"beta={beta}: {trials} trials done")
    return out


def write_csv(path, records) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=FIELDS)
        w.writeheader()
        for r in records:
            w.writerow(asdict(r))


def read_csv(path) -> list:
    with open(path, newline="") as fh:
        rd = csv.DictReader(fh)
        if tuple(rd.fieldnames or ()) != FIELDS:
            raise ValueError(f"unexpected columns {rd.fieldnames}")
        return [BenchRecord(int(r["n"]), int(r["m"]), float(r["beta"]), r["op"],
                            int(r["wall_time_ns"]), int(r["trial"]), int(r["seed"])) for r in rd]


def per_size(records, beta, op, stat="min") -> dict:
    f = {"min": np.min, "median": np.median}[stat]
    groups = {}
    for r in records:
        if r.beta == beta and r.op == op:
            groups.setdefault(r.n, []).append(r.wall_time_ns)
    return {n: float(f(v)) for n, v in sorted(groups.items())}


def loglog_slope(xs, ys) -> float:
    """Least-squares slope of log y against log x."""
    if len(xs) < 2:
        return float("nan")
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def slope(records, beta, op, stat="min") -> float:
    if op == "update+query":
        u = per_size_pairs(records, beta, stat)
        return loglog_slope(list(u), list(u.values()))
    t = per_size(records, beta, op, stat)
    return loglog_slope(list(t), list(t.values()))


def per_size_pairs(records, beta, stat="min") -> dict:
    """Per size, the statistic of update + query summed within each trial."""
    f = {"min": np.min, "median": np.median}[stat]
    acc = {}
    for r in records:
        if r.beta == beta and r.op in ("update", "query"):
            acc.setdefault((r.n, r.trial), 0)
            acc[r.n, r.trial] += r.wall_time_ns
    groups = {}
    for (n, _), v in sorted(acc.items()):
        groups.setdefault(n, []).append(v)
    return {n: float(f(v)) for n, v in groups.items()}


def summary(records) -> list:
    """(beta, op, min-fit slope, median-fit slope) for every beta and op present."""
    rows = []
    betas = sorted({r.beta for r in records})
    for beta in betas:
        ops = sorted({r.op for r in records if r.beta == beta})
        if "update" in ops and "query" in ops:
            ops.append("update+query")
        for op in ops:
            rows.append((beta, op, slope(records, beta, op, "min"), slope(records, beta, op, "median")))
    return rows
