from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from blct_surf.exact import (det, fmt_rational, interpolate_quadratic, is_negative_definite,
                             minimize_quadratic, parse_rational, quadratic_roots, solve)

fractions = st.fractions(min_value=-50, max_value=50, max_denominator=30)


def test_rational_round_trip():
    assert fmt_rational(Fraction(3)) == "3/1"
    assert fmt_rational(Fraction(-1, 100)) == "-1/100"
    assert parse_rational("1/100") == Fraction(1, 100)
    assert parse_rational(" 2 ") == 2
    with pytest.raises(ValueError):
        parse_rational("0.5.1")


@given(fractions)
def test_format_parse_inverse(x):
    assert parse_rational(fmt_rational(x)) == x


def test_negative_definite():
    assert is_negative_definite([[-1, 0], [0, -1]])
    assert is_negative_definite([[-3, 1], [1, -1]])
    assert not is_negative_definite([[-1, 1], [1, -1]])
    assert not is_negative_definite([[0]])
    assert det([[2, 1], [1, 1]]) == 1


def test_solve_singular():
    with pytest.raises(ValueError):
        solve([[1, 1], [1, 1]], [Fraction(1), Fraction(2)])


@given(st.lists(st.lists(fractions, min_size=3, max_size=3), min_size=3, max_size=3),
       st.lists(fractions, min_size=3, max_size=3))
def test_solve_satisfies_system(m, rhs):
    if det(m) == 0:
        return
    x = solve(m, rhs)
    for row, b in zip(m, rhs):
        assert sum(a * xi for a, xi in zip(row, x)) == b


def test_quadratic_roots():
    assert quadratic_roots(Fraction(2), Fraction(-3), Fraction(1)) == [1, 2]
    assert quadratic_roots(Fraction(1), Fraction(0), Fraction(1)) == []
    assert quadratic_roots(Fraction(-1, 2), Fraction(1), Fraction(0)) == [Fraction(1, 2)]
    with pytest.raises(ArithmeticError):
        quadratic_roots(Fraction(-2), Fraction(0), Fraction(1))


@given(fractions, fractions, fractions)
def test_interpolation_recovers_quadratic(c0, c1, c2):
    f = lambda x: c0 + c1 * x + c2 * x * x  # noqa: E731
    assert interpolate_quadratic(f, Fraction(0), Fraction(1, 2), Fraction(3)) == (c0, c1, c2)


@given(fractions, fractions, fractions)
def test_minimize_quadratic_beats_grid(c0, c1, c2):
    lo, hi = Fraction(-1), Fraction(2)
    arg, val = minimize_quadratic((c0, c1, c2), lo, hi)
    assert lo <= arg <= hi
    assert val == c0 + c1 * arg + c2 * arg * arg
    for i in range(31):
        x = lo + (hi - lo) * Fraction(i, 30)
        assert val <= c0 + c1 * x + c2 * x * x
