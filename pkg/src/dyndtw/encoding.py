"""Map curve coordinates to the arrays the kernels run on.

Exact coordinates are multiplied by the lcm of their denominators so every
kernel works on integers.  DTW and all boundary distances are 1-homogeneous in
the coordinates for L1 and Linf, so results are simply divided back.  The
integer arrays are int64 when a caller-supplied growth factor proves no
overflow, and object arrays of Python ints otherwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .metric import EXACT, Metric

INT_LIMIT = 1 << 62


@dataclass(frozen=True)
class Encoding:
    mode: str
    scale: int = 1
    dtype: object = np.float64

    @property
    def exact(self):
        return self.mode == EXACT

    @property
    def native(self):
        return self.dtype is not object

    def array(self, points) -> np.ndarray:
        if not self.exact:
            return np.array(points, dtype=np.float64).reshape(len(points), -1)
        rows = [[int(c * self.scale) for c in p] for p in points]
        arr = np.empty((len(rows), len(rows[0]) if rows else 0), dtype=object)
        for i, r in enumerate(rows):
            arr[i, :] = r
        if self.dtype is not object:
            arr = arr.astype(np.int64)
        return arr

    def fits(self, point) -> bool:
        """Can ``point`` be represented without changing the scale?"""
        if not self.exact:
            return True
        return all((c * self.scale).denominator == 1 for c in point)

    def decode(self, v):
        if not self.exact:
            return float(v)
        if isinstance(v, float):
            if math.isinf(v):
                return v
            raise TypeError("float leaked into an exact computation")
        return Fraction(int(v), self.scale)

    def decode_array(self, arr) -> np.ndarray:
        if not self.exact:
            return np.asarray(arr, dtype=np.float64)
        out = np.empty(arr.shape, dtype=object)
        flat = out.reshape(-1)
        for k, v in enumerate(np.asarray(arr).reshape(-1)):
            flat[k] = Fraction(int(v), self.scale)
        return out

    def encode_scalar(self, v):
        if not self.exact:
            return float(v)
        x = Fraction(v) * self.scale
        if x.denominator != 1:
            raise ValueError("value not representable at this scale")
        return int(x) if self.dtype is object else np.int64(int(x))


def max_abs(points) -> Fraction:
    m = Fraction(0)
    for p in points:
        for c in p:
            a = abs(c)
            if a > m:
                m = a
    return m


def distance_bound(metric: Metric, dim: int, maxabs) -> float:
    """Upper bound on the distance of two points with |coords| <= maxabs."""
    per = 2 * maxabs
    return per * (dim if metric is Metric.L1 else 1)


def choose(mode: str, point_sets, metric: Metric, growth: int) -> Encoding:
    """Pick scale and dtype for the given point sets.

    ``growth`` bounds (sum of values computed) / (largest single distance);
    int64 is used only if growth * max distance stays below 2**62.
    """
    if mode != EXACT:
        return Encoding(mode)
    scale = 1
    dim = 1
    for pts in point_sets:
        for p in pts:
            dim = len(p)
            for c in p:
                scale = math.lcm(scale, c.denominator)
    maxabs = max((max_abs(pts) for pts in point_sets), default=Fraction(0))
    bound = distance_bound(metric, dim, maxabs * scale)
    dtype = np.int64 if (bound + 1) * growth < INT_LIMIT else object
    return Encoding(mode, scale, dtype)


def oracle_growth(n: int, m: int) -> int:
    return n + m + 2


def structure_growth(n: int, m: int) -> int:
    # W <= 3nm * maxd + 1, table entries <= (n+m) * W, rescaled W' adds the
    # largest wavefront value, and x + table' is formed before comparing.
    return 4 * (n + m + 4) * (3 * n * m + n + m + 4)
