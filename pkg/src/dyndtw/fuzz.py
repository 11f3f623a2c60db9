"""Differential fuzzing of the dynamic structure against the quadratic oracle.

A run is fully described by a ``FuzzCase``: the two starting curves and an
edit list.  The start curves and every edit are followed by a query on
both sides; ``checks`` counts the post-edit comparisons.  Failing cases are
shrunk by dropping edits (and then trimming the start curves) while the
mismatch persists, and are saved as JSON that ``replay`` runs again.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .dynamic import DynamicDtw
from .errors import EmptyCurveError
from .metric import EXACT, FLOAT, Curve, CurveEdit, apply_edit, format_scalar
from .oracle import dtw


@dataclass
class FuzzCase:
    P: list
    Q: list
    edits: list
    metric: str = "L1"
    mode: str = EXACT
    beta: float = 0.5
    deamortized: bool = False

    def curves(self):
        return Curve.of(self.P, self.mode), Curve.of(self.Q, self.mode)

    def to_json(self) -> dict:
        pts = lambda C: [[format_scalar(x) for x in p] for p in C]
        P, Q = self.curves()
        return {"metric": self.metric, "mode": self.mode, "beta": self.beta,
                "deamortized": self.deamortized, "P": pts(P), "Q": pts(Q),
                "edits": [e.to_json() for e in self.edits]}

    @classmethod
    def from_json(cls, obj: dict) -> "FuzzCase":
        mode = obj["mode"]
        return cls(obj["P"], obj["Q"], [CurveEdit.from_json(e, mode) for e in obj["edits"]],
                   obj.get("metric", "L1"), mode, float(obj.get("beta", 0.5)),
                   bool(obj.get("deamortized", False)))


@dataclass
class FuzzResult:
    checks: int = 0
    failed_at: int | None = None
    log: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failed_at is None


def _same(a, b, mode) -> bool:
    if mode == EXACT:
        return a == b
    if math.isinf(a) or math.isinf(b):
        return a == b
    return abs(a - b) <= 1e-9 * max(1.0, abs(b))


def run_case(case: FuzzCase, log: bool = True) -> FuzzResult:
    """Replay ``case``; stops at the first disagreement."""
    res = FuzzResult()
    P, Q = case.curves()
    ds = DynamicDtw(P, Q, case.metric, case.beta, deamortized=case.deamortized)
    for step in range(len(case.edits) + 1):
        if step:
            e = case.edits[step - 1]
            ds.update(e)
            if e.side == "P":
                P = apply_edit(P, e)
            else:
                Q = apply_edit(Q, e)
        got, want = ds.query(), dtw(P, Q, case.metric)
        res.checks += bool(step)
        ok = _same(got, want, case.mode)
        if log:
            what = "start" if not step else json.dumps(case.edits[step - 1].to_json(), sort_keys=True)
            res.log.append(f"{step} {what} n={len(P)} m={len(Q)} "
                           f"dyn={format_scalar(got)} oracle={format_scalar(want)} {'ok' if ok else 'MISMATCH'}")
        if not ok:
            res.failed_at = step
            break
    return res


def _fails(case: FuzzCase) -> bool:
    try:
        return not run_case(case, log=False).ok
    except (IndexError, EmptyCurveError, ValueError):
        # a shrink step produced an edit list that no longer applies
        return False


def minimize(case: FuzzCase) -> FuzzCase:
    """Greedy shrink: drop edit chunks, then trim start points, while it still fails."""
    cur = FuzzCase(list(case.P), list(case.Q), list(case.edits), case.metric, case.mode,
                   case.beta, case.deamortized)
    res = run_case(cur, log=False)
    if res.ok:
        return cur
    cur.edits = cur.edits[:res.failed_at]
    chunk = max(1, len(cur.edits) // 2)
    while chunk >= 1:
        i = 0
        changed = False
        while i < len(cur.edits):
            trial = FuzzCase(cur.P, cur.Q, cur.edits[:i] + cur.edits[i + chunk:], cur.metric,
                             cur.mode, cur.beta, cur.deamortized)
            if _fails(trial):
                cur = trial
                changed = True
            else:
                i += chunk
        if not changed:
            chunk //= 2
    for side in ("P", "Q"):
        k = 0
        while k < len(getattr(cur, side)) and len(getattr(cur, side)) > 1:
            pts = getattr(cur, side)
            trial = FuzzCase(cur.P, cur.Q, cur.edits, cur.metric, cur.mode, cur.beta, cur.deamortized)
            setattr(trial, side, pts[:k] + pts[k + 1:])
            if _fails(trial):
                cur = trial
            else:
                k += 1
    return cur


def _coord(rng: random.Random, mode: str):
    if mode == FLOAT:
        return round(rng.uniform(-10, 10), 3)
    return Fraction(rng.randint(-20, 20), rng.choice((1, 1, 1, 2, 3)))


def random_case(rng: random.Random, ops: int, max_len: int, beta: float, mode=EXACT,
                metric="L1", dim=1, deamortized=False) -> FuzzCase:
    """Random start curves of length 1..max_len and ``ops`` valid edits that keep them there."""
    point = lambda: tuple(_coord(rng, mode) for _ in range(dim))
    P = [point() for _ in range(rng.randint(1, max_len))]
    Q = [point() for _ in range(rng.randint(1, max_len))]
    lens = {"P": len(P), "Q": len(Q)}
    edits = []
    for _ in range(ops):
        side = rng.choice("PQ")
        n = lens[side]
        kinds = ["substitute"]
        if n < max_len:
            kinds.append("insert")
        if n > 1:
            kinds.append("delete")
        kind = rng.choice(kinds)
        if kind == "insert":
            edits.append(CurveEdit.insert(side, rng.randint(1, n + 1), point()))
            lens[side] += 1
        elif kind == "delete":
            edits.append(CurveEdit.delete(side, rng.randint(1, n)))
            lens[side] -= 1
        else:
            edits.append(CurveEdit.substitute(side, rng.randint(1, n), point()))
    return FuzzCase(P, Q, edits, metric, mode, beta, deamortized)


def save_case(path, case: FuzzCase) -> None:
    with open(path, "w") as fh:
        json.dump(case.to_json(), fh)
        fh.write("\n")


def load_case(path) -> FuzzCase:
    with open(path) as fh:
        return FuzzCase.from_json(json.load(fh))
