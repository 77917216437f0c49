from __future__ import annotations

import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from blct_surf.lattice import (INF, DivisorClass, ModelError, ModelParams, baseline_model, build_model,
                               model_to_dict, params_from_dict)

R7 = ModelParams(7, ModelParams.default_blown(7), Fraction(1, 100))


@pytest.fixture(scope="module")
def m7():
    return build_model(R7)


def test_self_intersection_of_C(m7):
    C = m7.class_of("C")
    assert m7.intersect(C, C) == -3
    assert m7.intersect(m7.f, C) == 2
    assert m7.intersect(m7.class_of("E1"), m7.class_of("F1")) == 1


def test_class_labels(m7):
    f, g = m7.f, m7.g
    e = [m7.e(i) for i in range(1, 8)]
    C = f + 2 * g
    for v in e:
        C = C - v
    assert m7.class_of("C") == C
    assert m7.class_of("piF") == f
    assert m7.class_of("F1") == f - e[0]
    assert m7.class_of("G_3") == g - e[2]
    assert m7.class_of("e_2") == m7.class_of("E2") == e[1]


def test_anticanonical_square(m7):
    b = m7.beta
    K = m7.anticanonical_log
    assert m7.intersect(K, K) == Fraction(397, 10000) == 4 * b - b * b * (7 - 4)


@pytest.mark.parametrize("r", range(5, 13))
def test_anticanonical_square_formula(r):
    b = Fraction(1, 7 * r)
    m = build_model(ModelParams(r, ModelParams.default_blown(r), b))
    K = m.anticanonical_log
    assert m.intersect(K, K) == 4 * b - b * b * (r - 4)


def test_catalog_self_intersections(m7):
    for rec in m7.catalog:
        assert rec.self_intersection == m7.intersect(rec.cls, rec.cls)
    neg = {rec.label for rec in m7.negative_curves()}
    assert {"C", "E1", "F1", "G1"} <= neg
    assert m7.record("F0").tangency_to_C == 2
    assert m7.record(f"F{INF}").tangency_to_C == 2
    assert m7.record("F1").tangency_to_C == 1


def test_tangency_point_blown():
    m = build_model(ModelParams(7, ModelParams.default_blown(7, blow_zero=True), Fraction(1, 100)))
    assert m.params.blown == ("0", "1", "2", "3", "4", "5", "6")
    assert m.record("F0").cls == m.f - m.e("0")
    assert m.tangent_points() == {"0": True, INF: False}


def test_parse_class(m7):
    assert m7.parse_class("1*f + 1/100*C") == m7.anticanonical_log
    assert m7.parse_class("antiK - e1") == m7.anticanonical_log - m7.e(1)
    assert m7.parse_class("-2 g") == -2 * m7.g
    for bad in ("", "f +", "f g", "3*Q"):
        with pytest.raises(ModelError):
            m7.parse_class(bad)


@pytest.mark.parametrize("params", [
    ModelParams(6, ("1", "2", "3", "4", "5"), Fraction(1, 100)),
    ModelParams(4, ("1", "2", "3", "4"), Fraction(1, 100)),
    ModelParams(7, ModelParams.default_blown(7), Fraction(2, 3)),
    ModelParams(7, ModelParams.default_blown(7), Fraction(0)),
    ModelParams(7, ("1", "2", "3", "4", "5", "6", "9"), Fraction(1, 100)),
    ModelParams(0, ("1",), Fraction(1, 100)),
])
def test_invalid_params(params):
    with pytest.raises(ModelError):
        build_model(params)


def test_repeated_label():
    with pytest.raises(ModelError):
        ModelParams(7, ("1", "1", "2", "3", "4", "5", "6"), Fraction(1, 100))


def test_unknown_point(m7):
    with pytest.raises(ModelError):
        m7.e(0)


def test_dimension_mismatch(m7):
    with pytest.raises(ModelError):
        m7.intersect(m7.f, baseline_model().f)


def test_baseline():
    b = baseline_model()
    D = b.f + b.g
    assert b.intersect(D, D) == 2
    assert [rec.label for rec in b.catalog] == ["C", "piF", "piG"]


def test_model_round_trip(m7):
    data = json.loads(json.dumps(model_to_dict(m7)))
    again = build_model(params_from_dict(data))
    assert again == m7
    assert model_to_dict(again) == data


classes = st.lists(st.fractions(min_value=-20, max_value=20, max_denominator=12), min_size=9, max_size=9)


@given(classes, classes, classes, st.fractions(min_value=-5, max_value=5, max_denominator=7))
def test_pairing_bilinear_symmetric(a, b, c, t):
    m = build_model(R7)
    A, B, Cc = DivisorClass(tuple(a)), DivisorClass(tuple(b)), DivisorClass(tuple(c))
    assert m.intersect(A, B) == m.intersect(B, A)
    assert m.intersect(A + t * B, Cc) == m.intersect(A, Cc) + t * m.intersect(B, Cc)
