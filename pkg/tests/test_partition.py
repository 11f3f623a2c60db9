import math
import random

import hypothesis.strategies as st
import pytest
from hypothesis import given

from dyndtw import CurveEdit, RebuildRequired
from dyndtw.partition import (PartitionConfig, PartitionedCurves, RebuildScheduler, init_partition,
                              initial_sizes, partition_update, scheduler_step)


def test_config_validation():
    with pytest.raises(ValueError):
        PartitionConfig(0.6, 10)
    with pytest.raises(ValueError):
        PartitionConfig(0.5, 0)
    cfg = PartitionConfig(0.5, 4096)
    assert cfg.unit == 64 and cfg.max_size == 128 and cfg.budget == 2048


def test_init_examples():
    cfg = PartitionConfig(0.5, 4)           # m0^beta = 2
    assert initial_sizes(2, cfg) == [2]
    assert sorted(initial_sizes(5, cfg)) == [2, 3]
    assert initial_sizes(1, PartitionConfig(0.5, 100)) == [1]


@given(st.integers(1, 3000), st.integers(1, 3000), st.sampled_from([0, 0.25, 0.5]))
def test_init_sizes_in_range(length, m0, beta):
    cfg = PartitionConfig(beta, m0)
    sizes = initial_sizes(length, cfg)
    assert sum(sizes) == length
    if length >= cfg.unit:
        assert all(cfg.unit <= s <= cfg.max_size for s in sizes)
    else:
        assert sizes == [length]
    part = init_partition(length, cfg)
    assert part.consistent()
    assert len(sizes) <= max(1, length // cfg.unit)


def test_insert_splits_full_subcurve():
    cfg = PartitionConfig(0.5, 9)           # unit 3, max 6
    part = init_partition(12, cfg)
    assert part.sizes == [6, 6]
    rep = partition_update(part, CurveEdit.insert("P", 2, (0,)))
    assert part.sizes == [3, 4, 6]
    assert (rep.start, rep.removed, rep.created, rep.kind) == (0, 1, 2, "split")
    assert len(rep) == 2


def test_delete_merges_small_subcurve():
    cfg = PartitionConfig(0.5, 16)          # target 4, unit 4, max 8, merge below 2
    part = init_partition(16, cfg)
    for _ in range(6):
        partition_update(part, CurveEdit.delete("P", 9))
    assert part.sizes == [8, 2]
    rep = partition_update(part, CurveEdit.delete("P", 9))
    assert rep.removed == 2 and rep.created in (1, 2)
    assert part.sizes == [4, 5]           # merged to 9 > 8, split at the median
    assert rep.kind == "merge-split"


def test_substitute_reports_one():
    part = init_partition(20, PartitionConfig(0.5, 16))
    rep = partition_update(part, CurveEdit.substitute("P", 11, (1,)))
    assert (rep.start, rep.removed, rep.created) == (1, 1, 1) and len(rep) == 1
    assert part.sizes == [8, 12] or part.sizes == [8, 8, 4] or sum(part.sizes) == 20


def test_budget():
    part = init_partition(8, PartitionConfig(0.5, 8))
    for _ in range(4):
        partition_update(part, CurveEdit.substitute("P", 1, (0,)))
    with pytest.raises(RebuildRequired):
        partition_update(part, CurveEdit.substitute("P", 1, (0,)))
    loose = init_partition(8, PartitionConfig(0.5, 8), strict=False)
    for _ in range(20):
        partition_update(loose, CurveEdit.substitute("P", 1, (0,)))


def test_edit_ranges():
    part = init_partition(5, PartitionConfig(0.5, 4))
    with pytest.raises(IndexError):
        partition_update(part, CurveEdit.insert("P", 7, (0,)))
    with pytest.raises(IndexError):
        partition_update(part, CurveEdit.delete("P", 6))


@st.composite
def edit_runs(draw):
    n = draw(st.integers(4, 400))
    beta = draw(st.sampled_from([0, 0.25, 0.5]))
    m0 = n
    steps = draw(st.integers(0, m0 // 2))
    pattern = draw(st.sampled_from(["random", "hammer-insert", "hammer-delete", "front", "back"]))
    return n, beta, steps, pattern, draw(st.integers(0, 2 ** 32))


def adversarial_edit(rng, pattern, length, spot):
    if pattern == "hammer-insert":
        return CurveEdit.insert("P", min(spot, length + 1), (0,))
    if pattern == "hammer-delete" and length > 1:
        return CurveEdit.delete("P", min(spot, length))
    if pattern == "front" and length > 1:
        return CurveEdit.delete("P", 1)
    if pattern == "back":
        return CurveEdit.insert("P", length + 1, (0,))
    kind = rng.choice(["insert", "delete", "substitute"] if length > 1 else ["insert", "substitute"])
    if kind == "insert":
        return CurveEdit.insert("P", rng.randint(1, length + 1), (0,))
    if kind == "delete":
        return CurveEdit.delete("P", rng.randint(1, length))
    return CurveEdit.substitute("P", rng.randint(1, length), (0,))


@given(edit_runs())
def test_sizes_and_locality_between_rebuilds(run):
    n, beta, steps, pattern, seed = run
    rng = random.Random(seed)
    part = init_partition(n, PartitionConfig(beta, n))
    spot = rng.randint(1, n)
    for _ in range(steps):
        rep = partition_update(part, adversarial_edit(rng, pattern, part.length, spot))
        assert len(rep) <= 3
        assert part.consistent()
        assert part.size_bounds_ok(part.length)


# -- scheduler ---------------------------------------------------------------


def make_scheduler(n, beta=0.5):
    copy = PartitionedCurves(n, n, beta, strict=False)
    return RebuildScheduler(copy, PartitionedCurves.builder(beta),
                            lambda snap: PartitionedCurves.work(snap, beta))


def test_scheduler_idle_matches_plain_update():
    s = make_scheduler(64)
    plain = init_partition(64, PartitionConfig(0.5, 64))
    e = CurveEdit.insert("P", 3, (0,))
    rep = scheduler_step(s, e)
    assert rep == partition_update(plain, e)
    assert s.phase == "idle" and s.active.parts["P"].sizes == plain.sizes


def test_scheduler_snapshot_at_nine_units():
    s = make_scheduler(64)               # u = 2, counter starts at 16
    assert s.counter == 16
    scheduler_step(s, CurveEdit.substitute("P", 1, (0,)))
    assert s.phase == "idle"
    scheduler_step(s, CurveEdit.substitute("Q", 1, (0,)))
    assert s.phase == "build" and s.log[0] == ("snapshot", 2)
    scheduler_step(s, CurveEdit.insert("P", 1, (0,)))
    assert len(s.queue) == 1


def test_scheduler_swaps_with_equal_copies():
    rng = random.Random(5)
    m0 = 256
    s = make_scheduler(m0)
    lengths = {"P": m0, "Q": m0}
    swaps_at = []
    for step in range(1, 2 * m0 + 1):
        side = rng.choice("PQ")
        n = lengths[side]
        kind = rng.choice(["insert", "delete", "substitute"])
        if kind == "insert":
            e = CurveEdit.insert(side, rng.randint(1, n + 1), (0,))
            lengths[side] += 1
        elif kind == "delete":
            e = CurveEdit.delete(side, rng.randint(1, n))
            lengths[side] -= 1
        else:
            e = CurveEdit.substitute(side, rng.randint(1, n), (0,))
        before = s.swaps
        old_spare = s.spare
        scheduler_step(s, e)
        assert s.active.snapshot() == (lengths["P"], lengths["Q"])
        assert len(s.queue) <= m0 / 16 + 4
        if s.swaps != before:
            swaps_at.append(step)
            assert s.active is old_spare
            # the new copy has seen every edit
            for side in "PQ":
                assert s.active.parts[side].length == lengths[side]
                assert s.active.parts[side].consistent()
    # one swap roughly every 9u edits, u = m0 / 32
    gaps = [b - a for a, b in zip([0] + swaps_at, swaps_at)]
    assert len(swaps_at) >= 5
    assert all(7 * m0 / 32 <= g <= 11 * m0 / 32 for g in gaps[1:]), gaps


def test_scheduler_build_is_sliced():
    s = make_scheduler(128, beta=0.25)
    per_step = []
    for k in range(200):
        before = s.phase
        scheduler_step(s, CurveEdit.substitute("P", 1 + k % 100, (0,)))
        if before == "build":
            per_step.append(s._quota)
    work = PartitionedCurves.work((128, 128), 0.25)
    assert per_step and max(per_step) <= math.ceil(work / (128 / 32))
