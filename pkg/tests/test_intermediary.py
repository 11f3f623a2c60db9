import json
import random
from fractions import Fraction

import hypothesis.strategies as st
import pytest
from hypothesis import given, settings

from dyndtw import INF, Curve, InvalidInstanceError, ReductionInconsistencyError, dtw
from dyndtw.dynamic import DynamicDtw
from dyndtw.intermediary import (GADGET, STAR_RUN, IntermediaryInstance, alpha_points,
                                 apply_update_to_curves, beta_points, build_curves, diagonal_cost,
                                 infinity_threshold, load_instance, minimal_u, random_instance,
                                 recover_answer, reduction_curves, save_instance, solve_direct,
                                 star, straight_cost, update, white_boundary_vertices,
                                 white_free_dtw)
from dyndtw.oracle import dtw_witness


def inst2(r, c, d, b):
    return IntermediaryInstance.with_minimal_u(r, c, d, b)


def test_minimal_u():
    assert minimal_u(1, 1, [0], [0], [0]) == 4       # bound clamps to 1
    assert minimal_u(2, 2, [1, 1], [1, 0], [3, 2]) == 49   # 4 * 9 = 36 -> 49


def test_validation():
    with pytest.raises(InvalidInstanceError):
        IntermediaryInstance(1, 1, [0], [0], [0], [1], 5)        # not a square
    with pytest.raises(InvalidInstanceError):
        IntermediaryInstance(2, 2, [1, 1], [1, 0], [3, 2], [1, 1], 36)   # not above the bound
    with pytest.raises(InvalidInstanceError):
        IntermediaryInstance(2, 1, [0], [0], [0, 0], [1], 16)
    with pytest.raises(InvalidInstanceError):
        IntermediaryInstance(1, 1, [-1], [0], [0], [1], 16)
    IntermediaryInstance(2, 2, [1, 1], [1, 0], [3, 2], [1, 1], 49)


def test_solve_direct_examples():
    assert solve_direct(inst2([0], [0], [5], [1])) == 0
    inst = inst2([0, 0], [0, 1], [3, 5], [1, 1])
    assert solve_direct(inst) == 3
    update(inst, 0, False)
    assert solve_direct(inst) == 0
    # no matching identifier on the only diagonal: the walk pays sqrt(U) and is infinite
    assert solve_direct(inst2([0, 0], [1, 1], [3, 5], [1, 1])) is INF
    one_by_three = inst2([0], [0, 0, 0], [1], [1, 1, 1])
    assert solve_direct(one_by_three) == 2 * one_by_three.U
    assert infinity_threshold(one_by_three) == 2 * one_by_three.U + one_by_three.sqrt_u


def test_update_range():
    inst = inst2([0], [0], [1], [1])
    with pytest.raises(IndexError):
        update(inst, 1, True)


def test_full_layout_one_by_one():
    inst = inst2([1], [1], [2], [1])
    pair = build_curves(inst)
    U = inst.U
    assert len(pair.P) == len(pair.Q) == GADGET
    assert [p[0] for p in pair.P] == [star(U)] * 8 + alpha_points(1, 2, U) + [star(U)] * 8
    assert [q[0] for q in pair.Q] == [star(U)] * 8 + beta_points(1, True, U) + [star(U)] * 8
    assert alpha_points(1, 2, U)[0] == U ** 4 + 2 * U ** 3 + 0.5


def gadget(points, U):
    return Curve.of([star(U)] * STAR_RUN + points + [star(U)] * STAR_RUN)


@pytest.mark.parametrize("r,d", [(0, 0), (1, 3), (2, 5)])
def test_straight_crossing_cost(r, d):
    U = 49
    assert dtw(gadget(alpha_points(r, d, U), U), Curve.of([star(U)])) == straight_cost(U)
    assert dtw(Curve.of([star(U)]), gadget(beta_points(r, True, U), U)) == straight_cost(U)


@pytest.mark.parametrize("d,b", [(0, 1), (3, 1), (3, 0), (7, 1)])
def test_diagonal_crossing_cost(d, b):
    inst = inst2([1, 1], [1, 1], [d, 0], [b, 0])
    U = inst.U
    got = dtw(gadget(alpha_points(1, d, U), U), gadget(beta_points(1, b, U), U))
    assert got == diagonal_cost(inst, 0, 0) == 4 * U + d * b


def test_unmatched_diagonal_is_expensive():
    inst = inst2([0, 0], [1, 1], [3, 0], [1, 1])
    U = inst.U
    got = dtw(gadget(alpha_points(0, 3, U), U), gadget(beta_points(1, True, U), U))
    assert got >= U ** 3


def test_update_moves_two_points():
    inst = inst2([0, 0, 1], [0, 1, 1], [2, 3, 4], [1, 0, 1])
    pair = reduction_curves(inst)
    before = [q[0] for q in pair.Q]
    update(inst, 1, True)
    edits = apply_update_to_curves(pair, inst, 1, True)
    assert [e.index for e in edits] == [GADGET + STAR_RUN + 3, GADGET + STAR_RUN + 4]
    after = [q[0] for q in pair.Q]
    moved = [k for k in range(len(before)) if before[k] != after[k]]
    assert [abs(after[k] - before[k]) for k in moved] == [2 * inst.U] * 2
    update(inst, 1, True)
    assert apply_update_to_curves(pair, inst, 1, True) == []
    # the last column has no gadget in the aligned layout
    update(inst, 2, False)
    assert apply_update_to_curves(pair, inst, 2, False) == []


@settings(max_examples=40)
@given(st.integers(0, 2 ** 32))
def test_round_trip_static(seed):
    rng = random.Random(seed)
    inst = random_instance(rng, max_side=4)
    pair = reduction_curves(inst)
    for _ in range(3):
        assert recover_answer(dtw(pair.P, pair.Q), inst) == solve_direct(inst)
        j = rng.randrange(inst.n_c)
        x = rng.random() < 0.5
        update(inst, j, x)
        apply_update_to_curves(pair, inst, j, x)


def test_round_trip_dynamic():
    rng = random.Random(11)
    for _ in range(5):
        inst = random_instance(rng, max_side=5)
        pair = reduction_curves(inst)
        ds = DynamicDtw(pair.P, pair.Q, beta=0.5)
        for _ in range(10):
            assert recover_answer(ds.query(), inst) == solve_direct(inst)
            j = rng.randrange(inst.n_c)
            x = rng.random() < 0.5
            update(inst, j, x)
            for e in apply_update_to_curves(pair, inst, j, x):
                ds.update(e)


def test_recover_rejects_inconsistent_values():
    inst = inst2([0, 0], [0, 1], [3, 5], [1, 1])
    with pytest.raises(ReductionInconsistencyError):
        recover_answer(0, inst)
    pair = reduction_curves(inst)
    good = dtw(pair.P, pair.Q)
    assert recover_answer(good, inst) == 3
    with pytest.raises(ReductionInconsistencyError):
        recover_answer(good + Fraction(1, 2), inst)


def test_infinite_answers_agree():
    rng = random.Random(4)
    seen_inf = 0
    for _ in range(60):
        inst = random_instance(rng, max_side=4, max_id=2)
        pair = reduction_curves(inst)
        want = solve_direct(inst)
        assert recover_answer(dtw(pair.P, pair.Q), inst) == want
        seen_inf += want is INF
    assert seen_inf > 0


@settings(max_examples=25)
@given(st.integers(0, 2 ** 32))
def test_some_optimal_traversal_avoids_white_boundary(seed):
    inst = random_instance(random.Random(seed), max_side=3)
    for pair in (build_curves(inst), reduction_curves(inst)):
        assert white_free_dtw(pair) == dtw(pair.P, pair.Q)


def test_white_boundary_helper():
    inst = inst2([0], [0], [1], [1])
    pair = build_curves(inst)
    # walk the star column first, then the inner points of Q against P's last star
    T = [(i, 1) for i in range(1, 21)] + [(20, j) for j in range(2, 21)]
    hits = white_boundary_vertices(pair, T)
    assert hits == [(9, 1), (10, 1), (11, 1), (12, 1), (20, 9), (20, 10), (20, 11), (20, 12)]
    v, W = dtw_witness(pair.P, pair.Q)
    assert v == 4 * inst.U + 1
    assert white_boundary_vertices(pair, list(zip(range(1, 21), range(1, 21)))) == []


def test_json_round_trip(tmp_path):
    inst = inst2([0, 3], [3], [10, 0], [1])
    big = IntermediaryInstance(2, 1, [0, 3], [3], [10, 0], [1], (10 ** 20) ** 2)
    for x in (inst, big):
        path = tmp_path / "inst.json"
        save_instance(path, x)
        assert isinstance(json.loads(path.read_text())["U"], str)
        assert load_instance(path) == x
    path.write_text(json.dumps({**inst.to_json(), "U": "12x"}))
    with pytest.raises(InvalidInstanceError):
        load_instance(path)
    path.write_text("{not json")
    with pytest.raises(InvalidInstanceError):
        load_instance(path)
    path.write_text(json.dumps({"n_r": 1}))
    with pytest.raises(InvalidInstanceError):
        load_instance(path)
