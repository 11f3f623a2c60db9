"""Partitions of a curve into subcurves of size about m0**beta, kept valid under edits.

Sizes are maintained with two local rules.  An insertion goes to the subcurve
that holds the new vertex's successor (the last subcurve for an append) and a
subcurve that grows past 2*ceil(m0**beta) is split at its median.  A deletion
that leaves a subcurve below m0**beta / 2 merges it into its left neighbour
(right if it is the first), and the merged piece is split at its median if it
is too long.  Every edit therefore rewrites at most two adjacent slots, which
is reported as a splice.

The partition only stays balanced for m0/2 updates; after that the owner has
to rebuild.  ``RebuildScheduler`` hides that rebuild behind a second copy that
is built a few units of work per step while the first one keeps serving.
"""
from __future__ import annotations

import math
from bisect import bisect_left
from collections import deque
from dataclasses import dataclass, field
from itertools import accumulate
from typing import Callable, Iterator

from .errors import EmptyCurveError, RebuildRequired
from .metric import CurveEdit


def _ceil(x: float) -> int:
    # guard against 4096 ** 0.25 == 8.000000000000002
    r = round(x)
    return r if abs(x - r) < 1e-9 else math.ceil(x)


@dataclass(frozen=True)
class PartitionConfig:
    beta: float
    m0: int

    def __post_init__(self):
        if not 0 <= self.beta <= 0.5:
            raise ValueError(f"beta must lie in [0, 1/2], got {self.beta}")
        if self.m0 < 1:
            raise ValueError(f"m0 must be positive, got {self.m0}")

    @property
    def target(self) -> float:
        return self.m0 ** self.beta

    @property
    def unit(self) -> int:
        return max(1, _ceil(self.target))

    @property
    def max_size(self) -> int:
        return 2 * self.unit

    @property
    def merge_below(self) -> float:
        return self.target / 2

    @property
    def budget(self) -> int:
        return max(1, self.m0 // 2)


@dataclass(frozen=True)
class ChangeReport:
    """Splice of the subcurve list caused by one edit.

    Slots ``start .. start + removed - 1`` of the old list were replaced by
    slots ``start .. start + created - 1`` of the new one.  ``len`` is the
    number of slots touched.
    """

    start: int
    removed: int
    created: int
    kind: str = "resize"

    def __len__(self):
        return max(self.removed, self.created)

    @property
    def new_slots(self) -> range:
        return range(self.start, self.start + self.created)

    @property
    def old_slots(self) -> range:
        return range(self.start, self.start + self.removed)


class SubcurvePartition:
    """Sizes of consecutive subcurves of one curve.

    Subcurve k (0-based) covers 1-based vertex indices (x_k, x_{k+1}] where
    x = cuts().  ``strict`` makes updates past the budget raise
    RebuildRequired.
    """

    def __init__(self, sizes, cfg: PartitionConfig, strict: bool = True):
        self.sizes = list(sizes)
        self.cfg = cfg
        self.strict = strict
        self.updates = 0
        self._cuts = None

    def __len__(self):
        return len(self.sizes)

    def __repr__(self):
        return f"SubcurvePartition(sizes={self.sizes}, beta={self.cfg.beta}, m0={self.cfg.m0})"

    @property
    def length(self) -> int:
        return self.cuts()[-1]

    def cuts(self) -> list:
        if self._cuts is None:
            self._cuts = [0] + list(accumulate(self.sizes))
        return self._cuts

    def locate(self, index: int) -> int:
        """Subcurve holding 1-based vertex ``index``."""
        cuts = self.cuts()
        if not 1 <= index <= cuts[-1]:
            raise IndexError(f"vertex {index} outside 1..{cuts[-1]}")
        return bisect_left(cuts, index) - 1

    def interval(self, k: int) -> tuple:
        """1-based inclusive vertex range of subcurve k."""
        cuts = self.cuts()
        return cuts[k] + 1, cuts[k + 1]

    def intervals(self) -> list:
        cuts = self.cuts()
        return [(cuts[k] + 1, cuts[k + 1]) for k in range(len(self.sizes))]

    def copy(self) -> "SubcurvePartition":
        out = SubcurvePartition(self.sizes, self.cfg, self.strict)
        out.updates = self.updates
        return out

    def _touch(self):
        self._cuts = None

    def size_bounds_ok(self, m: int) -> bool:
        """Every size in [m**beta / 4, 4 m**beta], unless there is only one subcurve."""
        if len(self.sizes) == 1:
            return True
        lo = 0.25 * m ** self.cfg.beta
        hi = 4.0 * m ** self.cfg.beta
        return all(lo <= s <= hi for s in self.sizes)

    def consistent(self) -> bool:
        cuts = self.cuts()
        if any(s <= 0 for s in self.sizes) or cuts[0] != 0:
            return False
        if any(a >= b for a, b in zip(cuts, cuts[1:])):
            return False
        return all(self.locate(i) == k for k, (lo, hi) in enumerate(self.intervals())
                   for i in (lo, hi))


def initial_sizes(length: int, cfg: PartitionConfig) -> list:
    """Greedy chunks of 2*ceil(m0**beta); an undersized tail is merged back and
    split at the median."""
    if length < 1:
        raise EmptyCurveError("cannot partition an empty curve")
    big = cfg.max_size
    q, r = divmod(length, big)
    sizes = [big] * q
    if r:
        if q and r < cfg.unit:
            s = sizes.pop() + r
            sizes += [s // 2, s - s // 2]
        else:
            sizes.append(r)
    return sizes


def init_partition(curve_or_length, cfg: PartitionConfig, strict: bool = True) -> SubcurvePartition:
    length = curve_or_length if isinstance(curve_or_length, int) else len(curve_or_length)
    return SubcurvePartition(initial_sizes(length, cfg), cfg, strict)


def partition_update(part: SubcurvePartition, edit: CurveEdit) -> ChangeReport:
    """Apply ``edit`` (its side is ignored here) and report the splice."""
    if part.strict and part.updates >= part.cfg.budget:
        raise RebuildRequired(f"{part.updates} updates since the last rebuild (budget {part.cfg.budget})")
    n = part.length
    sizes = part.sizes
    cfg = part.cfg
    if edit.kind == "insert":
        if not 1 <= edit.index <= n + 1:
            raise IndexError(f"insert index {edit.index} outside 1..{n + 1}")
        k = part.locate(edit.index) if edit.index <= n else len(sizes) - 1
        sizes[k] += 1
        if sizes[k] > cfg.max_size:
            s = sizes[k]
            sizes[k:k + 1] = [s // 2, s - s // 2]
            rep = ChangeReport(k, 1, 2, "split")
        else:
            rep = ChangeReport(k, 1, 1, "resize")
    elif edit.kind == "delete":
        if not 1 <= edit.index <= n:
            raise IndexError(f"delete index {edit.index} outside 1..{n}")
        if n == 1:
            raise EmptyCurveError("deleting the last vertex would empty the curve")
        k = part.locate(edit.index)
        sizes[k] -= 1
        if sizes[k] < cfg.merge_below and len(sizes) > 1:
            lo = k - 1 if k > 0 else k
            s = sizes[lo] + sizes[lo + 1]
            if s > cfg.max_size:
                sizes[lo:lo + 2] = [s // 2, s - s // 2]
                rep = ChangeReport(lo, 2, 2, "merge-split")
            else:
                sizes[lo:lo + 2] = [s]
                rep = ChangeReport(lo, 2, 1, "merge")
        else:
            rep = ChangeReport(k, 1, 1, "resize")
    else:
        if not 1 <= edit.index <= n:
            raise IndexError(f"substitute index {edit.index} outside 1..{n}")
        rep = ChangeReport(part.locate(edit.index), 1, 1, "modify")
    part._touch()
    part.updates += 1
    return rep


# ---------------------------------------------------------------------------
# two-copy rebuild


class PartitionedCurves:
    """Minimal structure copy: the two partitions of a curve pair.

    Used on its own to exercise the scheduler and as the protocol example for
    heavier copies (``apply``, ``snapshot``, ``m``).
    """

    def __init__(self, n: int, m: int, beta: float, strict: bool = True):
        cfg = PartitionConfig(beta, min(n, m))
        self.cfg = cfg
        self.parts = {"P": init_partition(n, cfg, strict), "Q": init_partition(m, cfg, strict)}

    def apply(self, edit: CurveEdit) -> ChangeReport:
        return partition_update(self.parts[edit.side], edit)

    def snapshot(self):
        return self.parts["P"].length, self.parts["Q"].length

    @property
    def m(self) -> int:
        return min(self.snapshot())

    @classmethod
    def builder(cls, beta: float):
        def build(snap) -> Iterator:
            n, m = snap
            # one unit of work per subcurve, as a heavier copy would build per block
            out = cls(n, m, beta, strict=False)
            for _ in range(len(out.parts["P"]) + len(out.parts["Q"])):
                yield
            return out
        return build

    @staticmethod
    def work(snap, beta: float) -> int:
        n, m = snap
        cfg = PartitionConfig(beta, min(n, m))
        return len(initial_sizes(n, cfg)) + len(initial_sizes(m, cfg))


@dataclass
class RebuildScheduler:
    """Serve edits from an active copy while the next copy is built in slices.

    With u = m0/32 for the active copy (m0 = its reference length at
    snapshot time) the phases are:

    idle      counter below 9u; edits go to the active copy only.
    build     entered when the counter reaches 9u: the curves are
              snapshotted and the new copy is built over the next u steps,
              ceil(work / u) units per step; every edit is also queued.
    catch-up  up to four queued edits per step are replayed on the new copy.
    dual      queue empty; every edit goes to both copies.  Once the new
              copy has seen 8 u' edits (u' from its own m0) the copies swap.

    ``build(snapshot)`` must be a generator that yields once per unit of work
    and returns the new copy; ``work(snapshot)`` estimates its units.
    """

    active: object
    build: Callable
    work: Callable
    counter: float = -1
    phase: str = "idle"
    queue: deque = field(default_factory=deque)
    spare: object = None
    spare_counter: int = 0
    swaps: int = 0
    steps: int = 0
    _gen: object = None
    _quota: int = 1
    _snap: object = None
    log: list = field(default_factory=list)

    def __post_init__(self):
        if self.counter < 0:
            self.counter = 8 * self.unit(self.active)

    @staticmethod
    def unit(copy) -> float:
        return copy.cfg.m0 / 32

    def status(self) -> dict:
        return {"phase": self.phase, "counter": self.counter, "queue": len(self.queue),
                "spare_counter": self.spare_counter, "swaps": self.swaps}


def scheduler_step(s: RebuildScheduler, edit: CurveEdit) -> ChangeReport:
    """One edit under the two-copy protocol; returns the active copy's report."""
    s.steps += 1
    report = s.active.apply(edit)
    s.counter += 1
    u = s.unit(s.active)
    if s.phase == "idle":
        if s.counter >= 9 * u:
            s._snap = s.active.snapshot()
            s._gen = s.build(s._snap)
            s._quota = max(1, math.ceil(s.work(s._snap) / max(u, 1.0)))
            s.phase = "build"
            s.log.append(("snapshot", s.steps))
        return report
    if s.phase == "build":
        s.queue.append(edit)
        for _ in range(s._quota):
            try:
                next(s._gen)
            except StopIteration as stop:
                s.spare = stop.value
                s.spare_counter = 0
                s._gen = None
                s.phase = "catch-up"
                s.log.append(("built", s.steps))
                break
        return report
    if s.phase == "catch-up":
        s.queue.append(edit)
        for _ in range(min(4, len(s.queue))):
            s.spare.apply(s.queue.popleft())
            s.spare_counter += 1
        if not s.queue:
            s.phase = "dual"
            s.log.append(("caught-up", s.steps))
        _maybe_swap(s)
        return report
    # dual
    s.spare.apply(edit)
    s.spare_counter += 1
    _maybe_swap(s)
    return report


def _maybe_swap(s: RebuildScheduler) -> None:
    if s.phase == "dual" and s.spare_counter >= 8 * s.unit(s.spare):
        s.active, s.spare = s.spare, None
        s.counter = s.spare_counter
        s.spare_counter = 0
        s.phase = "idle"
        s.swaps += 1
        s.log.append(("swap", s.steps))
