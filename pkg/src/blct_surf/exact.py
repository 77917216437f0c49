"""Small exact linear algebra over :class:`fractions.Fraction`.

Everything here works on plain lists of Fractions.  Matrices are tiny
(at most the size of a curve catalog), so Gaussian elimination is enough.
"""
from __future__ import annotations

from fractions import Fraction
from math import isqrt
from typing import Sequence

Matrix = Sequence[Sequence[Fraction]]


def parse_rational(text: str | int | Fraction) -> Fraction:
    """Parse ``"p/q"``, ``"p"`` or an int into a reduced Fraction."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    s = str(text).strip()
    if not s:
        raise ValueError("empty rational")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational number: {text!r}") from exc


def fmt_rational(x: Fraction | int) -> str:
    """Serialize as a reduced ``"p/q"`` string; integers keep ``/1``."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def det(m: Matrix) -> Fraction:
    n = len(m)
    a = [[Fraction(v) for v in row] for row in m]
    sign = 1
    result = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            sign = -sign
        p = a[col][col]
        result *= p
        for r in range(col + 1, n):
            f = a[r][col] / p
            if f:
                for c in range(col, n):
                    a[r][c] -= f * a[col][c]
    return sign * result


def leading_minors(m: Matrix) -> list[Fraction]:
    return [det([row[:k] for row in m[:k]]) for k in range(1, len(m) + 1)]


def is_negative_definite(m: Matrix) -> bool:
    """Sylvester's criterion: leading minors alternate in sign, starting negative."""
    for k, d in enumerate(leading_minors(m), start=1):
        if d == 0 or (d > 0) != (k % 2 == 0):
            return False
    return True


def solve(m: Matrix, rhs: Sequence[Fraction]) -> list[Fraction]:
    """Solve ``m x = rhs`` exactly.  Raises ``ValueError`` if ``m`` is singular."""
    n = len(m)
    a = [[Fraction(v) for v in row] + [Fraction(rhs[i])] for i, row in enumerate(m)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            raise ValueError("singular system")
        a[col], a[pivot] = a[pivot], a[col]
        p = a[col][col]
        a[col] = [v / p for v in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [vr - f * vc for vr, vc in zip(a[r], a[col])]
    return [a[i][n] for i in range(n)]


def rational_sqrt(x: Fraction) -> Fraction | None:
    """Exact square root of a nonnegative rational, or None if irrational."""
    if x < 0:
        return None
    p, q = x.numerator, x.denominator
    sp, sq = isqrt(p), isqrt(q)
    if sp * sp == p and sq * sq == q:
        return Fraction(sp, sq)
    return None


def quadratic_roots(c0: Fraction, c1: Fraction, c2: Fraction) -> list[Fraction]:
    """Real roots of ``c0 + c1 x + c2 x^2``, sorted.

    Raises ``ArithmeticError`` when the roots exist but are irrational.
    Returns an empty list for a polynomial without real roots.  The
    identically zero polynomial is rejected.
    """
    if c2 == 0:
        if c1 == 0:
            if c0 == 0:
                raise ValueError("zero polynomial has no isolated roots")
            return []
        return [-c0 / c1]
    disc = c1 * c1 - 4 * c0 * c2
    if disc < 0:
        return []
    s = rational_sqrt(disc)
    if s is None:
        raise ArithmeticError(f"irrational roots (discriminant {disc})")
    return sorted({(-c1 - s) / (2 * c2), (-c1 + s) / (2 * c2)})


def interpolate_quadratic(f, x0: Fraction, x1: Fraction, x2: Fraction) -> tuple[Fraction, Fraction, Fraction]:
    """Coefficients (c0, c1, c2) of the quadratic through three samples of ``f``."""
    xs = (x0, x1, x2)
    ys = [Fraction(f(x)) for x in xs]
    m = [[Fraction(1), x, x * x] for x in xs]
    c0, c1, c2 = solve(m, ys)
    return c0, c1, c2


def minimize_quadratic(c: tuple[Fraction, Fraction, Fraction], lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    """Exact minimum of ``c0 + c1 x + c2 x^2`` on ``[lo, hi]``; returns (argmin, value)."""
    c0, c1, c2 = c
    candidates = [lo, hi]
    if c2 > 0:
        v = -c1 / (2 * c2)
        if lo < v < hi:
            candidates.append(v)
    best = min(candidates, key=lambda x: (c0 + c1 * x + c2 * x * x, x))
    return best, c0 + c1 * best + c2 * best * best
