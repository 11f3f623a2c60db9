"""Quadratic dynamic programs for DTW and monotone grid distances.

These are the ground truth for every differential test, so they are kept as
plain as possible: one recurrence, no cleverness beyond a rolling row.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

from .encoding import choose, oracle_growth
from .metric import Curve, Metric, check_pair


@njit(cache=True)
def _dtw_rolling(X, Y, cost):
    n = X.shape[0]
    m = Y.shape[0]
    row = np.empty(m, X.dtype)
    row[0] = cost(X, 0, Y, 0)
    for j in range(1, m):
        row[j] = row[j - 1] + cost(X, 0, Y, j)
    for i in range(1, n):
        diag = row[0]
        row[0] = row[0] + cost(X, i, Y, 0)
        for j in range(1, m):
            best = row[j]
            if diag < best:
                best = diag
            if row[j - 1] < best:
                best = row[j - 1]
            diag = row[j]
            row[j] = best + cost(X, i, Y, j)
    return row[m - 1]


@njit(cache=True)
def _dtw_table(X, Y, cost):
    n = X.shape[0]
    m = Y.shape[0]
    dp = np.empty((n, m), X.dtype)
    dp[0, 0] = cost(X, 0, Y, 0)
    for j in range(1, m):
        dp[0, j] = dp[0, j - 1] + cost(X, 0, Y, j)
    for i in range(1, n):
        dp[i, 0] = dp[i - 1, 0] + cost(X, i, Y, 0)
        for j in range(1, m):
            best = dp[i - 1, j]
            if dp[i - 1, j - 1] < best:
                best = dp[i - 1, j - 1]
            if dp[i, j - 1] < best:
                best = dp[i, j - 1]
            dp[i, j] = best + cost(X, i, Y, j)
    return dp


def _prepare(P: Curve, Q: Curve, metric):
    metric = Metric.parse(metric)
    check_pair(P, Q, metric)
    enc = choose(P.mode, [P.points, Q.points], metric, oracle_growth(len(P), len(Q)))
    X = enc.array(P.points)
    Y = enc.array(Q.points)
    cost = metric.cost_kernel
    if not enc.native:
        return enc, X, Y, cost.py_func, True
    return enc, X, Y, cost, False


def dtw(P: Curve, Q: Curve, metric="L1"):
    """DTW distance of P and Q (minimum traversal cost)."""
    enc, X, Y, cost, slow = _prepare(P, Q, metric)
    fn = _dtw_rolling.py_func if slow else _dtw_rolling
    return enc.decode(fn(X, Y, cost))


def dtw_array(X: np.ndarray, Y: np.ndarray, metric="L1"):
    """DTW on raw float64/int64 coordinate arrays (no validation, no decoding)."""
    return _dtw_rolling(X, Y, Metric.parse(metric).cost_kernel)


def grid_table(P: Curve, Q: Curve, metric="L1") -> np.ndarray:
    """Full DP table; entry [i-1, j-1] is the distance from (1,1) to (i,j)."""
    enc, X, Y, cost, slow = _prepare(P, Q, metric)
    fn = _dtw_table.py_func if slow else _dtw_table
    return enc.decode_array(fn(X, Y, cost))


def dtw_witness(P: Curve, Q: Curve, metric="L1"):
    """DTW value together with one optimal traversal (1-based index pairs).

    Backtracking prefers the diagonal predecessor, then the vertical one
    (i - 1, j), then the horizontal one (i, j - 1).
    """
    enc, X, Y, cost, slow = _prepare(P, Q, metric)
    fn = _dtw_table.py_func if slow else _dtw_table
    dp = fn(X, Y, cost)
    i, j = dp.shape[0] - 1, dp.shape[1] - 1
    steps = [(i + 1, j + 1)]
    while i or j:
        here = dp[i, j] - cost(X, i, Y, j)
        if i and j and dp[i - 1, j - 1] == here:
            i, j = i - 1, j - 1
        elif i and dp[i - 1, j] == here:
            i -= 1
        elif j and dp[i, j - 1] == here:
            j -= 1
        else:
            # float rounding: fall back to the smallest predecessor
            cands = []
            if i and j:
                cands.append((dp[i - 1, j - 1], 0, i - 1, j - 1))
            if i:
                cands.append((dp[i - 1, j], 1, i - 1, j))
            if j:
                cands.append((dp[i, j - 1], 2, i, j - 1))
            _, _, i, j = min(cands)
        steps.append((i + 1, j + 1))
    steps.reverse()
    return enc.decode(dp[-1, -1]), steps


def traversal_cost(P: Curve, Q: Curve, steps, metric="L1"):
    metric = Metric.parse(metric)
    total = None
    for i, j in steps:
        d = metric.distance(P[i - 1], Q[j - 1])
        total = d if total is None else total + d
    return total


def is_traversal(steps, n: int, m: int) -> bool:
    if not steps or steps[0] != (1, 1) or steps[-1] != (n, m):
        return False
    for (a, b), (c, d) in zip(steps, steps[1:]):
        if (c - a, d - b) not in ((1, 0), (0, 1), (1, 1)):
            return False
    return True


def monotone_distance(P: Curve, Q: Curve, metric, src, dst):
    """Cheapest xy-monotone path cost from src to dst, both endpoints included.

    Indices are 1-based.  Returns ``math.inf`` if dst is not weakly above and
    to the right of src.
    """
    n, m = len(P), len(Q)
    (i, j), (x, y) = src, dst
    for a, hi in ((i, n), (x, n), (j, m), (y, m)):
        if not 1 <= a <= hi:
            raise IndexError(f"grid index {a} outside 1..{hi}")
    if x < i or y < j:
        return math.inf
    sub_p = Curve(P.points[i - 1:x], P.mode)
    sub_q = Curve(Q.points[j - 1:y], Q.mode)
    return dtw(sub_p, sub_q, metric)
