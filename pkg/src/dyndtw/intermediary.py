"""The Intermediary grid problem and its reduction to DTW on the real line.

An instance is an n_r x n_c grid walked from (0, 0) to (n_r - 1, n_c - 1).
Horizontal and vertical edges cost U.  The diagonal out of (i, j) costs
d_i * b_j when the row and column identifiers agree and sqrt(U) otherwise.
The answer is infinite once the shortest walk reaches U |n_r - n_c| + sqrt(U),
i.e. whenever it needs an unmatched diagonal.

Each row becomes a 20-point curve alpha_i and each column a 20-point curve
beta_j: eight copies of the far-left point -U^5, four points encoding the
row (r_i, d_i) or column (c_j, b_j), eight more copies of -U^5.  Changing b_j
moves exactly two points of beta_j, so the dynamic grid problem becomes a
dynamic DTW instance under substitutions.

Two curve layouts are produced.  ``build_curves`` concatenates every gadget.
That gives an (n_r + 1) x (n_c + 1) arrangement of all-star blocks, one more
diagonal step than the grid has, so its DTW is not the grid answer shifted by
a constant.  ``reduction_curves`` drops the gadgets of the last row and the
last column, whose weights no grid diagonal can reach; its block arrangement
is n_r x n_c and ``recover_answer`` inverts it exactly.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .errors import InvalidInstanceError, ReductionInconsistencyError
from .metric import EXACT, INF, Curve, CurveEdit

GADGET = 20
STAR_RUN = 8


def _clamped_bound(n_r, n_c, r, c, d) -> int:
    # a zero maximum would make the bound vacuous (U = 1 breaks the gadgets)
    f = max(1, max(d)) * max(1, max(r)) * max(1, max(c))
    return n_r * n_c * f * f


def minimal_u(n_r, n_c, r, c, d) -> int:
    """Smallest perfect square strictly above the clamped legality bound."""
    s = math.isqrt(_clamped_bound(n_r, n_c, r, c, d)) + 1
    return s * s


@dataclass
class IntermediaryInstance:
    n_r: int
    n_c: int
    r: list
    c: list
    d: list
    b: list
    U: int

    def __post_init__(self):
        self.r = list(self.r)
        self.c = list(self.c)
        self.d = list(self.d)
        self.b = [bool(x) for x in self.b]
        self.validate()

    def validate(self) -> None:
        def ints(name, xs, n):
            if len(xs) != n:
                raise InvalidInstanceError(f"{name} has {len(xs)} entries, expected {n}")
            for x in xs:
                if isinstance(x, bool) or not isinstance(x, int) or x < 0:
                    raise InvalidInstanceError(f"{name} entries must be non-negative integers, got {x!r}")

        for name in ("n_r", "n_c", "U"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise InvalidInstanceError(f"{name} must be a positive integer, got {v!r}")
        ints("r", self.r, self.n_r)
        ints("c", self.c, self.n_c)
        ints("d", self.d, self.n_r)
        if len(self.b) != self.n_c:
            raise InvalidInstanceError(f"b has {len(self.b)} entries, expected {self.n_c}")
        if math.isqrt(self.U) ** 2 != self.U:
            raise InvalidInstanceError(f"U = {self.U} is not a perfect square")
        bound = _clamped_bound(self.n_r, self.n_c, self.r, self.c, self.d)
        if self.U <= bound:
            raise InvalidInstanceError(f"U = {self.U} must exceed {bound}")

    @property
    def sqrt_u(self) -> int:
        return math.isqrt(self.U)

    @classmethod
    def with_minimal_u(cls, r, c, d, b) -> "IntermediaryInstance":
        n_r, n_c = len(r), len(c)
        return cls(n_r, n_c, r, c, d, b, minimal_u(n_r, n_c, r, c, d))

    def copy(self) -> "IntermediaryInstance":
        return IntermediaryInstance(self.n_r, self.n_c, self.r, self.c, self.d, self.b, self.U)

    def to_json(self) -> dict:
        return {"n_r": self.n_r, "n_c": self.n_c, "r": self.r, "c": self.c, "d": self.d,
                "b": [int(x) for x in self.b], "U": str(self.U)}

    @classmethod
    def from_json(cls, obj: dict) -> "IntermediaryInstance":
        try:
            U = obj["U"]
            if isinstance(U, str):
                if not U.strip().isdigit():
                    raise InvalidInstanceError(f"U must be a decimal string, got {U!r}")
                U = int(U)
            return cls(obj["n_r"], obj["n_c"], obj["r"], obj["c"], obj["d"], obj["b"], U)
        except KeyError as e:
            raise InvalidInstanceError(f"missing field {e.args[0]!r}") from None
        except TypeError as e:
            raise InvalidInstanceError(str(e)) from None


def load_instance(path) -> IntermediaryInstance:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise InvalidInstanceError(f"{path}: {e}") from None
    if not isinstance(obj, dict):
        raise InvalidInstanceError(f"{path}: expected a JSON object")
    return IntermediaryInstance.from_json(obj)


def save_instance(path, inst: IntermediaryInstance) -> None:
    Path(path).write_text(json.dumps(inst.to_json()) + "\n")


def random_instance(rng: random.Random, max_side=6, max_id=4, max_d=8) -> IntermediaryInstance:
    n_r = rng.randint(1, max_side)
    n_c = rng.randint(1, max_side)
    return IntermediaryInstance.with_minimal_u(
        [rng.randint(0, max_id) for _ in range(n_r)],
        [rng.randint(0, max_id) for _ in range(n_c)],
        [rng.randint(0, max_d) for _ in range(n_r)],
        [rng.random() < 0.5 for _ in range(n_c)])


def diagonal_weight(inst: IntermediaryInstance, i: int, j: int) -> int:
    """Weight of the diagonal edge (i, j) -> (i + 1, j + 1)."""
    if inst.r[i] == inst.c[j]:
        return inst.d[i] * int(inst.b[j])
    return inst.sqrt_u


def infinity_threshold(inst: IntermediaryInstance) -> int:
    return inst.U * abs(inst.n_r - inst.n_c) + inst.sqrt_u


def solve_direct(inst: IntermediaryInstance):
    """Shortest (0, 0) -> (n_r - 1, n_c - 1) walk, or INF past the threshold."""
    inst.validate()
    n_r, n_c, U = inst.n_r, inst.n_c, inst.U
    prev = [j * U for j in range(n_c)]
    for i in range(1, n_r):
        cur = [prev[0] + U] + [0] * (n_c - 1)
        for j in range(1, n_c):
            cur[j] = min(prev[j] + U, cur[j - 1] + U, prev[j - 1] + diagonal_weight(inst, i - 1, j - 1))
        prev = cur
    v = prev[-1]
    return INF if v >= infinity_threshold(inst) else v


def update(inst: IntermediaryInstance, j: int, x: bool) -> None:
    """Set b_j := x (0-based column)."""
    if not 0 <= j < inst.n_c:
        raise IndexError(f"column {j} outside 0..{inst.n_c - 1}")
    inst.b[j] = bool(x)


# ---------------------------------------------------------------------------
# gadget curves


def star(U) -> int:
    return -U ** 5


def alpha_points(r_i: int, d_i: int, U: int) -> list:
    q = Fraction(d_i, 4)
    U3, U4 = U ** 3, U ** 4
    return [U4 + 2 * r_i * U3 + q, 2 * U4 + 2 * r_i * U3 - q,
            3 * U4 - 2 * r_i * U3 + q, 4 * U4 - 2 * r_i * U3 - q]


def beta_points(c_j: int, b_j: bool, U: int) -> list:
    s = -1 if b_j else 1
    U3, U4 = U ** 3, U ** 4
    return [U4 + 2 * c_j * U3 - U, 2 * U4 + 2 * c_j * U3 + U,
            3 * U4 - 2 * c_j * U3 + s * U, 4 * U4 - 2 * c_j * U3 - s * U]


def _gadget(inner: list, U: int) -> list:
    st = star(U)
    return [st] * STAR_RUN + inner + [st] * STAR_RUN


@dataclass
class GadgetCurvePair:
    """Curves of a reduction plus where each gadget sits in them.

    ``rows[i]`` / ``cols[j]`` is the 0-based start of alpha_i in P / beta_j in
    Q, or None when that gadget was dropped.
    """

    P: Curve
    Q: Curve
    rows: list
    cols: list
    variant: str
    U: int
    _p_kind: list = field(default=None, repr=False)
    _q_kind: list = field(default=None, repr=False)

    def col_range(self, j: int) -> range | None:
        s = self.cols[j]
        return None if s is None else range(s, s + GADGET)

    def row_range(self, i: int) -> range | None:
        s = self.rows[i]
        return None if s is None else range(s, s + GADGET)


def _pair(inst: IntermediaryInstance, n_rows: int, n_cols: int, variant: str) -> GadgetCurvePair:
    U = inst.U
    P, Q, rows, cols = [], [], [], []
    for i in range(inst.n_r):
        if i < n_rows:
            rows.append(len(P))
            P += _gadget(alpha_points(inst.r[i], inst.d[i], U), U)
        else:
            rows.append(None)
    for j in range(inst.n_c):
        if j < n_cols:
            cols.append(len(Q))
            Q += _gadget(beta_points(inst.c[j], inst.b[j], U), U)
        else:
            cols.append(None)
    # a curve without gadgets is a bare star run
    P = P or [star(U)] * STAR_RUN
    Q = Q or [star(U)] * STAR_RUN
    return GadgetCurvePair(Curve.of(P, EXACT), Curve.of(Q, EXACT), rows, cols, variant, U)


def build_curves(inst: IntermediaryInstance) -> GadgetCurvePair:
    """alpha_0 ... alpha_{n_r-1} against beta_0 ... beta_{n_c-1}."""
    inst.validate()
    return _pair(inst, inst.n_r, inst.n_c, "full")


def reduction_curves(inst: IntermediaryInstance) -> GadgetCurvePair:
    """The pair whose DTW ``recover_answer`` inverts: last row and column dropped."""
    inst.validate()
    return _pair(inst, inst.n_r - 1, inst.n_c - 1, "aligned")


def apply_update_to_curves(pair: GadgetCurvePair, inst: IntermediaryInstance, j: int, x: bool) -> list:
    """Re-encode column j after ``update(inst, j, x)``.

    Only beta_j^3 and beta_j^4 depend on b_j.  Returns the substitutions
    (1-based, side Q) whose values actually changed, after applying them to
    ``pair.Q``.
    """
    if not 0 <= j < inst.n_c:
        raise IndexError(f"column {j} outside 0..{inst.n_c - 1}")
    start = pair.cols[j]
    if start is None:
        return []
    new = beta_points(inst.c[j], inst.b[j], inst.U)
    pts = list(pair.Q.points)
    edits = []
    for k in (2, 3):
        pos = start + STAR_RUN + k
        p = (Fraction(new[k]),)
        if pts[pos] != p:
            pts[pos] = p
            edits.append(CurveEdit.substitute("Q", pos + 1, p))
    if edits:
        pair.Q = Curve(tuple(pts), pair.Q.mode)
    return edits


def straight_cost(U: int) -> int:
    """Cost of crossing one gadget between two horizontally/vertically adjacent star blocks."""
    return 4 * U ** 5 + 10 * U ** 4


def diagonal_cost(inst: IntermediaryInstance, i: int, j: int):
    """Cost of crossing gadget (i, j) diagonally when r_i = c_j."""
    return 4 * inst.U + inst.d[i] * int(inst.b[j])


def recover_answer(dtw_value, inst: IntermediaryInstance):
    """Grid answer from the DTW of ``reduction_curves(inst)``.

    The optimal traversal crosses |n_r - n_c| gadgets straight and
    min(n_r, n_c) - 1 gadgets diagonally; the grid walk pays U per straight
    step and nothing extra per matched diagonal.
    """
    U = inst.U
    dl = abs(inst.n_r - inst.n_c)
    v = Fraction(dtw_value)
    if v >= dl * straight_cost(U) + U ** 3:
        return INF
    out = v - dl * straight_cost(U) - 4 * (min(inst.n_r, inst.n_c) - 1) * U + dl * U
    if out < 0:
        raise ReductionInconsistencyError(f"recovered a negative answer {out} from DTW {dtw_value}")
    if out.denominator != 1:
        raise ReductionInconsistencyError(f"recovered a non-integer answer {out}")
    return int(out)


# ---------------------------------------------------------------------------
# vertex colors


def _kinds(starts: list, length: int) -> list:
    kind = [0] * length
    for s in starts:
        if s is not None:
            for k in range(4):
                kind[s + STAR_RUN + k] = k + 1
    return kind


def vertex_color(pair: GadgetCurvePair, i: int, j: int) -> str:
    """Color of grid vertex (P[i], Q[j]), 0-based: orange, white, grey or yellow."""
    if pair._p_kind is None:
        pair._p_kind = _kinds(pair.rows, len(pair.P))
        pair._q_kind = _kinds(pair.cols, len(pair.Q))
    a, b = pair._p_kind[i], pair._q_kind[j]
    if a == 0 and b == 0:
        return "orange"
    if a == 0 or b == 0:
        return "white"
    return "grey" if a == b else "yellow"


def on_gadget_boundary(pair: GadgetCurvePair, i: int, j: int) -> bool:
    """Whether (i, j) lies on the outer frame of the 20 x 20 gadget containing it."""
    li, lj = _local(pair.rows, i), _local(pair.cols, j)
    if li is None or lj is None:
        return False
    return li in (0, GADGET - 1) or lj in (0, GADGET - 1)


def _local(starts: list, i: int):
    for s in starts:
        if s is not None and s <= i < s + GADGET:
            return i - s
    return None


def white_boundary_vertices(pair: GadgetCurvePair, traversal) -> list:
    """Vertices of a 1-based traversal that are white gadget-boundary vertices."""
    out = []
    for i, j in traversal:
        if vertex_color(pair, i - 1, j - 1) == "white" and on_gadget_boundary(pair, i - 1, j - 1):
            out.append((i, j))
    return out


def white_free_dtw(pair: GadgetCurvePair):
    """DTW over traversals that avoid every white gadget-boundary vertex."""
    P = [p[0] for p in pair.P]
    Q = [q[0] for q in pair.Q]
    prev = None
    for i, p in enumerate(P):
        cur = [INF] * len(Q)
        for j, q in enumerate(Q):
            if vertex_color(pair, i, j) == "white" and on_gadget_boundary(pair, i, j):
                continue
            if i == 0 and j == 0:
                best = 0
            else:
                best = min(prev[j] if i else INF, cur[j - 1] if j else INF,
                           prev[j - 1] if i and j else INF)
            cur[j] = best + abs(p - q)
        prev = cur
    return prev[-1]
