"""Points, curves, edits and the ground metrics.

Two scalar modes exist.  ``exact`` stores coordinates as ``Fraction`` and
never rounds; ``float`` stores IEEE doubles.  A curve is an immutable tuple of
points of one dimension, and all edits are applied functionally.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from numba import njit

from .errors import DimensionError, EmptyCurveError, UnsupportedMetricError

INF = math.inf

EXACT = "exact"
FLOAT = "float"


def scalar(v, mode: str):
    """Coerce ``v`` into the scalar type of ``mode``."""
    if mode == EXACT:
        if isinstance(v, Fraction):
            return v
        if isinstance(v, bool):
            raise TypeError("bool is not a coordinate")
        if isinstance(v, (int, str)):
            return Fraction(v)
        if isinstance(v, float):
            if not math.isfinite(v):
                raise ValueError(f"non-finite coordinate {v!r}")
            return Fraction(v)
        if isinstance(v, np.integer):
            return Fraction(int(v))
        raise TypeError(f"cannot use {type(v).__name__} as an exact coordinate")
    if mode == FLOAT:
        if isinstance(v, str):
            v = Fraction(v)
        f = float(v)
        if not math.isfinite(f):
            raise ValueError(f"non-finite coordinate {v!r}")
        return f
    raise ValueError(f"unknown scalar mode {mode!r}")


def format_scalar(v) -> str:
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, int):
        return str(v)
    return repr(float(v))


def make_point(coords, mode: str) -> tuple:
    if isinstance(coords, (list, tuple, np.ndarray)):
        pt = tuple(scalar(c, mode) for c in coords)
    else:
        pt = (scalar(coords, mode),)
    if not pt:
        raise DimensionError("a point needs at least one coordinate")
    return pt


# cost kernels: distance between row i of X and row j of Y

@njit(cache=True)
def l1_cost(X, i, Y, j):
    acc = abs(X[i, 0] - Y[j, 0])
    for k in range(1, X.shape[1]):
        acc += abs(X[i, k] - Y[j, k])
    return acc


@njit(cache=True)
def linf_cost(X, i, Y, j):
    acc = abs(X[i, 0] - Y[j, 0])
    for k in range(1, X.shape[1]):
        v = abs(X[i, k] - Y[j, k])
        if v > acc:
            acc = v
    return acc


@njit(cache=True)
def l2_cost(X, i, Y, j):
    acc = (X[i, 0] - Y[j, 0]) ** 2
    for k in range(1, X.shape[1]):
        acc += (X[i, k] - Y[j, k]) ** 2
    return np.sqrt(acc)


class Metric(enum.Enum):
    """Ground metric on points.

    ``L2`` has no exact representation over the rationals and is only
    available in float mode.
    """

    L1 = "L1"
    L2 = "L2"
    LINF = "Linf"

    @classmethod
    def parse(cls, name) -> "Metric":
        if isinstance(name, Metric):
            return name
        key = str(name).strip().lower()
        for m in cls:
            if m.value.lower() == key:
                return m
        raise ValueError(f"unknown metric {name!r}")

    def check_mode(self, mode: str) -> None:
        if self is Metric.L2 and mode == EXACT:
            raise UnsupportedMetricError("L2 is not closed over the rationals; use float mode")

    def distance(self, p: Sequence, q: Sequence):
        if len(p) != len(q):
            raise DimensionError(f"dimension mismatch {len(p)} vs {len(q)}")
        if self is Metric.L1:
            return sum((abs(a - b) for a, b in zip(p, q)), start=type(p[0] - q[0])(0))
        if self is Metric.LINF:
            return max(abs(a - b) for a, b in zip(p, q))
        if isinstance(p[0], Fraction) or isinstance(q[0], Fraction):
            raise UnsupportedMetricError("L2 is not closed over the rationals; use float mode")
        return math.sqrt(sum((a - b) ** 2 for a, b in zip(p, q)))

    def pairwise(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        """Distance matrix between the rows of X and the rows of Y."""
        out = None
        for k in range(X.shape[1]):
            diff = X[:, k][:, None] - Y[:, k][None, :]
            if self is Metric.L2:
                term = diff * diff
            else:
                term = np.abs(diff)
            if out is None:
                out = term
            elif self is Metric.LINF:
                out = np.maximum(out, term)
            else:
                out = out + term
        if self is Metric.L2:
            out = np.sqrt(out)
        return out

    @property
    def cost_kernel(self):
        return {Metric.L1: l1_cost, Metric.L2: l2_cost, Metric.LINF: linf_cost}[self]


def distance(metric, p, q):
    return Metric.parse(metric).distance(p, q)


@dataclass(frozen=True)
class Curve:
    """A polygonal curve given by its vertex sequence."""

    points: tuple
    mode: str = EXACT

    def __post_init__(self):
        pts = tuple(make_point(p, self.mode) for p in self.points)
        if pts:
            d = len(pts[0])
            for p in pts:
                if len(p) != d:
                    raise DimensionError(f"mixed dimensions {d} and {len(p)} in one curve")
        object.__setattr__(self, "points", pts)

    @classmethod
    def of(cls, values: Iterable, mode: str = EXACT) -> "Curve":
        return cls(tuple(values), mode)

    def __len__(self):
        return len(self.points)

    def __getitem__(self, k):
        return self.points[k]

    def __iter__(self):
        return iter(self.points)

    @property
    def dim(self):
        return len(self.points[0]) if self.points else None

    def require_nonempty(self, name="curve"):
        if not self.points:
            raise EmptyCurveError(f"{name} is empty")


@dataclass(frozen=True)
class CurveEdit:
    """One vertex edit on curve ``side`` at 1-based position ``index``.

    insert: the new point becomes vertex ``index`` (1 <= index <= len+1).
    delete: vertex ``index`` is removed.
    substitute: vertex ``index`` is replaced.
    """

    side: str
    kind: str
    index: int
    point: tuple | None = None

    def __post_init__(self):
        if self.side not in ("P", "Q"):
            raise ValueError(f"side must be 'P' or 'Q', got {self.side!r}")
        if self.kind not in ("insert", "delete", "substitute"):
            raise ValueError(f"unknown edit kind {self.kind!r}")
        if (self.point is None) != (self.kind == "delete"):
            raise ValueError("insert/substitute need a point, delete takes none")

    @classmethod
    def insert(cls, side, index, point):
        return cls(side, "insert", index, tuple(point) if isinstance(point, (list, tuple)) else (point,))

    @classmethod
    def delete(cls, side, index):
        return cls(side, "delete", index)

    @classmethod
    def substitute(cls, side, index, point):
        return cls(side, "substitute", index, tuple(point) if isinstance(point, (list, tuple)) else (point,))

    def to_json(self) -> dict:
        out = {"side": self.side, "kind": self.kind, "index": self.index}
        if self.point is not None:
            out["point"] = [format_scalar(c) for c in self.point]
        return out

    @classmethod
    def from_json(cls, obj: dict, mode: str) -> "CurveEdit":
        pt = obj.get("point")
        return cls(obj["side"], obj["kind"], int(obj["index"]),
                   None if pt is None else make_point(pt, mode))


def edit_point(edit: CurveEdit, mode: str, dim: int) -> tuple | None:
    """The edit's point coerced to ``mode``, checked against ``dim``."""
    if edit.point is None:
        return None
    pt = make_point(edit.point, mode)
    if len(pt) != dim:
        raise DimensionError(f"point of dimension {len(pt)} in a curve of dimension {dim}")
    return pt


def check_edit(curve: Curve, edit: CurveEdit) -> tuple | None:
    """Validate ``edit`` against ``curve``; return the coerced point."""
    n = len(curve)
    hi = n + 1 if edit.kind == "insert" else n
    if not 1 <= edit.index <= hi:
        raise IndexError(f"{edit.kind} index {edit.index} outside 1..{hi}")
    if edit.kind == "delete":
        if n == 1:
            raise EmptyCurveError("deleting the last vertex would empty the curve")
        return None
    pt = make_point(edit.point, curve.mode)
    if n and len(pt) != curve.dim:
        raise DimensionError(f"point of dimension {len(pt)} in a curve of dimension {curve.dim}")
    return pt


def apply_edit(curve: Curve, edit: CurveEdit) -> Curve:
    pt = check_edit(curve, edit)
    pts = list(curve.points)
    k = edit.index - 1
    if edit.kind == "insert":
        pts.insert(k, pt)
    elif edit.kind == "delete":
        del pts[k]
    else:
        pts[k] = pt
    return Curve(tuple(pts), curve.mode)


def check_pair(P: Curve, Q: Curve, metric: Metric) -> None:
    P.require_nonempty("P")
    Q.require_nonempty("Q")
    if P.mode != Q.mode:
        raise ValueError("P and Q use different scalar modes")
    if P.dim != Q.dim:
        raise DimensionError(f"P has dimension {P.dim}, Q has dimension {Q.dim}")
    metric.check_mode(P.mode)


# JSON-lines curve files: one object per curve, {"side": "P", "coords": [...]}
# where coords is a list of points (a point is a list of scalars, or a bare
# scalar in one dimension).  Exact scalars are decimal strings or "a/b".

def read_curves(path, mode: str = EXACT) -> tuple[Curve, Curve]:
    found = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            side = obj.get("side")
            if side not in ("P", "Q"):
                raise ValueError(f"{path}:{lineno}: side must be P or Q")
            if side in found:
                raise ValueError(f"{path}:{lineno}: duplicate curve {side}")
            found[side] = Curve(tuple(obj["coords"]), mode)
    missing = {"P", "Q"} - found.keys()
    if missing:
        raise ValueError(f"{path}: missing curve(s) {sorted(missing)}")
    return found["P"], found["Q"]


def curve_json(side: str, curve: Curve) -> str:
    return json.dumps({"side": side, "coords": [[format_scalar(c) for c in p] for p in curve]})


def write_curves(path, P: Curve, Q: Curve) -> None:
    with open(path, "w") as fh:
        fh.write(curve_json("P", P) + "\n")
        fh.write(curve_json("Q", Q) + "\n")
