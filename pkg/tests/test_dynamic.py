import random
from fractions import Fraction

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given, settings

from dyndtw import EXACT, FLOAT, Curve, CurveEdit, EmptyCurveError, apply_edit, dtw
from dyndtw.dynamic import DynamicDtw
from dyndtw.fuzz import random_case, run_case


def test_single_vertex():
    ds = DynamicDtw(Curve.of([0]), Curve.of([0]))
    assert ds.shape == (1, 1)
    assert ds.query() == 0


def test_small_example():
    P = Curve.of(range(9))
    Q = Curve.of([0, 3, 5, 8])
    ds = DynamicDtw(P, Q, beta=0.5)
    assert ds.query() == dtw(P, Q) == 5
    ds.update(CurveEdit.substitute("Q", 2, (1,)))
    assert ds.query() == dtw(P, Curve.of([0, 1, 5, 8]))


def test_empty_curve_rejected():
    with pytest.raises(EmptyCurveError):
        DynamicDtw(Curve.of([]), Curve.of([1]))
    ds = DynamicDtw(Curve.of([1]), Curve.of([1, 2]))
    with pytest.raises(EmptyCurveError):
        ds.update(CurveEdit.delete("P", 1))
    assert ds.query() == 1


def test_bad_beta():
    with pytest.raises(ValueError):
        DynamicDtw(Curve.of([1]), Curve.of([1]), beta=0.7)


@pytest.mark.parametrize("beta", [0, 0.25, 0.5])
@pytest.mark.parametrize("deamortized", [False, True])
def test_matches_oracle_random_edits(beta, deamortized):
    rng = random.Random(int(beta * 100) + deamortized)
    for _ in range(4):
        case = random_case(rng, 60, 24, beta, deamortized=deamortized)
        res = run_case(case)
        assert res.ok, res.log[-3:]


def test_float_and_l2():
    rng = random.Random(3)
    for metric in ("L1", "L2", "Linf"):
        case = random_case(rng, 40, 20, 0.5, mode=FLOAT, metric=metric, dim=2)
        assert run_case(case).ok


def test_exact_l2_rejected():
    from dyndtw import UnsupportedMetricError
    with pytest.raises(UnsupportedMetricError):
        DynamicDtw(Curve.of([1]), Curve.of([1]), metric="L2")


def test_substitute_same_point_is_idempotent():
    P = Curve.of([3, 1, 4, 1, 5, 9, 2, 6])
    Q = Curve.of([2, 7, 1, 8, 2, 8])
    ds = DynamicDtw(P, Q)
    before = ds.query()
    ds.update(CurveEdit.substitute("P", 4, (1,)))
    assert ds.query() == before
    ds.verify_blocks()


def test_substitute_rebuilds_one_block_row():
    rng = random.Random(0)
    P = Curve.of([rng.randint(0, 9) for _ in range(64)])
    Q = Curve.of([rng.randint(0, 9) for _ in range(64)])
    ds = DynamicDtw(P, Q, beta=0.5)
    Ka, Kb = ds.shape
    built = ds.grid.blocks_built
    ds.update(CurveEdit.substitute("P", 20, (100,)))
    assert ds.grid.blocks_built - built == Kb
    built = ds.grid.blocks_built
    ds.update(CurveEdit.substitute("Q", 20, (100,)))
    assert ds.grid.blocks_built - built == Ka
    assert ds.query() == dtw(ds.P, ds.Q)


def test_lengths_differ_either_way():
    rng = random.Random(1)
    for n, m in ((5, 40), (40, 5), (1, 30), (30, 1)):
        P = Curve.of([rng.randint(-5, 5) for _ in range(n)])
        Q = Curve.of([rng.randint(-5, 5) for _ in range(m)])
        ds = DynamicDtw(P, Q, beta=0.5)
        assert ds.query() == dtw(P, Q)
        for k in range(10):
            e = CurveEdit.insert("PQ"[k % 2], 1, (k,))
            ds.update(e)
            P, Q = (apply_edit(P, e), Q) if e.side == "P" else (P, apply_edit(Q, e))
            assert ds.query() == dtw(P, Q)


def test_rational_coordinates():
    P = Curve.of([Fraction(1, 3), Fraction(5, 7), 2])
    Q = Curve.of([Fraction(-1, 2), 1])
    ds = DynamicDtw(P, Q)
    assert ds.query() == dtw(P, Q)
    ds.update(CurveEdit.insert("Q", 2, (Fraction(1, 11),)))
    assert ds.query() == dtw(P, Curve.of([Fraction(-1, 2), Fraction(1, 11), 1]))


def test_huge_coordinates_leave_native_ints():
    P = Curve.of([0, 1, 2, 3])
    Q = Curve.of([1, 2])
    ds = DynamicDtw(P, Q)
    ds.update(CurveEdit.substitute("P", 2, (10 ** 30,)))
    want = dtw(Curve.of([0, 10 ** 30, 2, 3]), Q)
    assert ds.query() == want


def test_debug_checks_wavefront(monkeypatch):
    monkeypatch.setenv("DTW_DEBUG_CHECKS", "1")
    rng = random.Random(7)
    for beta in (0, 0.25, 0.5):
        case = random_case(rng, 30, 48, beta)
        assert run_case(case, log=False).ok
    case = random_case(rng, 30, 48, 0.5, mode=FLOAT, metric="L2", dim=2)
    assert run_case(case, log=False).ok


def test_debug_checks_catch_stale_block(monkeypatch):
    monkeypatch.setenv("DTW_DEBUG_CHECKS", "1")
    rng = random.Random(2)
    P = Curve.of([rng.randint(0, 9) for _ in range(30)])
    Q = Curve.of([rng.randint(0, 9) for _ in range(30)])
    ds = DynamicDtw(P, Q)
    grid = ds.grid
    # corrupt one stored entry without telling the structure
    k = grid.slot[1, 1]
    grid.store.tables[k][0, 0] -= 1000
    with pytest.raises(AssertionError, match="differs from the oracle|different values"):
        ds.query()
    with pytest.raises(AssertionError, match="stale"):
        ds.verify_blocks()


def test_verify_blocks_after_edits():
    rng = random.Random(4)
    case = random_case(rng, 50, 40, 0.25)
    P, Q = case.curves()
    ds = DynamicDtw(P, Q, beta=0.25)
    for e in case.edits:
        ds.update(e)
    ds.verify_blocks()


@settings(max_examples=30)
@given(st.integers(0, 2 ** 32), st.sampled_from([0, 0.25, 0.5]))
def test_storage_matches_live_blocks(seed, beta):
    rng = random.Random(seed)
    case = random_case(rng, 40, 40, beta)
    P, Q = case.curves()
    ds = DynamicDtw(P, Q, beta=beta)
    for e in case.edits:
        ds.update(e)
        assert ds.stored_entries() == ds.grid.expected_entries()


def test_deamortized_equals_amortized():
    rng = random.Random(9)
    case = random_case(rng, 300, 40, 0.5)
    P, Q = case.curves()
    a = DynamicDtw(P, Q, beta=0.5)
    b = DynamicDtw(P, Q, beta=0.5, deamortized=True)
    for e in case.edits:
        a.update(e)
        b.update(e)
        assert a.query() == b.query()
    assert b.scheduler.swaps >= 1


def test_rebuild_after_budget():
    P = Curve.of(list(range(16)))
    Q = Curve.of(list(range(16)))
    ds = DynamicDtw(P, Q, beta=0.5)
    kinds = []
    for k in range(40):
        rep = ds.update(CurveEdit.substitute("P", 1 + k % 16, (k,)))
        kinds.append(rep.kind)
    assert "rebuild" in kinds
    ds.verify_blocks()
