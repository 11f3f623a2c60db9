from fractions import Fraction

import hypothesis.strategies as st
import pytest
from hypothesis import given

from dyndtw import (EXACT, FLOAT, Curve, CurveEdit, DimensionError, Metric,
                    UnsupportedMetricError, apply_edit, distance)
from dyndtw.metric import read_curves, write_curves

from conftest import curves, rationals


@pytest.mark.parametrize("metric,p,q,want", [
    ("L1", (3,), (5,), 2),
    ("L2", (3.0, 4.0), (0.0, 0.0), 5.0),
    ("Linf", (1, 7), (4, 2), 5),
])
def test_distance_examples(metric, p, q, want):
    assert distance(metric, p, q) == want


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        distance("L1", (1, 2), (1,))


def test_l2_is_float_only():
    with pytest.raises(UnsupportedMetricError):
        Metric.L2.check_mode(EXACT)
    P = Curve.of([0, 1])
    from dyndtw import dtw
    with pytest.raises(UnsupportedMetricError):
        dtw(P, P, "L2")


@given(st.sampled_from(["L1", "Linf"]), st.tuples(rationals, rationals), st.tuples(rationals, rationals))
def test_metric_axioms(metric, p, q):
    d = distance(metric, p, q)
    assert d == distance(metric, q, p) >= 0
    assert distance(metric, p, p) == 0


@given(st.tuples(st.integers(-50, 50), st.integers(-50, 50)),
       st.tuples(st.integers(-50, 50), st.integers(-50, 50)))
def test_l1_of_integer_points_is_integer(p, q):
    d = distance("L1", [Fraction(x) for x in p], [Fraction(x) for x in q])
    assert d.denominator == 1


@pytest.mark.parametrize("start,edit,want", [
    ((0, 1, 2), CurveEdit.delete("P", 2), (0, 2)),
    ((0, 2), CurveEdit.insert("P", 2, (1,)), (0, 1, 2)),
    ((0, 1), CurveEdit.substitute("P", 1, (9,)), (9, 1)),
])
def test_apply_edit_examples(start, edit, want):
    assert apply_edit(Curve.of(start), edit) == Curve.of(want)


def test_apply_edit_range():
    with pytest.raises(IndexError):
        apply_edit(Curve.of([0, 1]), CurveEdit.delete("P", 3))
    with pytest.raises(IndexError):
        apply_edit(Curve.of([0, 1]), CurveEdit.insert("P", 4, (1,)))


@given(curves(min_len=1), st.data())
def test_substitute_is_delete_then_insert(C, data):
    i = data.draw(st.integers(1, len(C)))
    x = (data.draw(rationals),)
    a = apply_edit(C, CurveEdit.substitute("Q", i, x))
    if len(C) > 1:
        b = apply_edit(apply_edit(C, CurveEdit.delete("Q", i)), CurveEdit.insert("Q", i, x))
        assert a == b
    assert len(a) == len(C)


@given(st.sampled_from(["insert", "delete", "substitute"]), curves(min_len=2))
def test_edit_length_change(kind, C):
    e = {"insert": CurveEdit.insert("P", 1, (0,)), "delete": CurveEdit.delete("P", 1),
         "substitute": CurveEdit.substitute("P", 1, (0,))}[kind]
    assert len(apply_edit(C, e)) - len(C) == {"insert": 1, "delete": -1, "substitute": 0}[kind]


def test_edit_json_round_trip():
    for e in (CurveEdit.insert("P", 3, (Fraction(1, 3), 2)), CurveEdit.delete("Q", 1)):
        assert CurveEdit.from_json(e.to_json(), EXACT) == e


def test_curve_file_round_trip(tmp_path):
    P = Curve.of([(Fraction(1, 2), 3), (-1, 0)])
    Q = Curve.of([(0, 0)])
    path = tmp_path / "c.jsonl"
    write_curves(path, P, Q)
    assert read_curves(path) == (P, Q)
    assert read_curves(path, FLOAT)[0].points[0] == (0.5, 3.0)


def test_curve_rejects_mixed_dimensions():
    with pytest.raises(DimensionError):
        Curve.of([(0, 1), (2,)])
