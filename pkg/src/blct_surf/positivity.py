"""Nef/ample tests, Zariski decomposition, volumes and thresholds along rays.

Positivity is decided against the model's finite curve catalog.  Along a ray
``L - xZ`` the Zariski chambers are walked exactly: on each chamber the
negative-part coefficients are affine in ``x``, so breakpoints are roots of
linear equations and the volume is a quadratic in ``x``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .exact import is_negative_definite, quadratic_roots, solve
from .lattice import CurveRecord, DivisorClass, SurfaceModel


class UnboundedRay(ArithmeticError):
    """``L - xZ`` never leaves the relevant cone, so the threshold is infinite."""


@dataclass(frozen=True)
class ZariskiDecomposition:
    positive_part: DivisorClass
    negative_part: dict[str, Fraction]

    @property
    def support(self) -> tuple[str, ...]:
        return tuple(lab for lab, a in self.negative_part.items() if a != 0)


@dataclass(frozen=True)
class NotPseudoeffective:
    reason: str

    def __bool__(self) -> bool:
        return False


@dataclass(frozen=True)
class PositivityReport:
    is_pseff: bool
    is_nef: bool
    is_ample: bool
    volume: Fraction
    decomposition: ZariskiDecomposition | None


def is_nef(model: SurfaceModel, d: DivisorClass) -> bool:
    return all(model.intersect(d, rec.cls) >= 0 for rec in model.catalog)


def is_ample(model: SurfaceModel, d: DivisorClass) -> bool:
    if any(model.intersect(d, rec.cls) <= 0 for rec in model.catalog):
        return False
    return model.intersect(d, d) > 0


def _ordered(model: SurfaceModel, order: Sequence[CurveRecord] | None) -> Sequence[CurveRecord]:
    return model.catalog if order is None else order


def _solve_negative_part(model: SurfaceModel, d: DivisorClass, active: list[CurveRecord]) -> list[Fraction]:
    gram = model.gram([rec.cls for rec in active])
    rhs = [model.intersect(d, rec.cls) for rec in active]
    return solve(gram, rhs)


def zariski(model: SurfaceModel, d: DivisorClass,
            order: Sequence[CurveRecord] | None = None) -> ZariskiDecomposition | NotPseudoeffective:
    """Zariski decomposition by monotone active-set growth.

    ``order`` optionally permutes the catalog; the result must not depend on it.
    """
    catalog = _ordered(model, order)
    active: list[CurveRecord] = []
    p = d
    coeffs: list[Fraction] = []
    for _ in range(len(catalog) + 1):
        if active:
            gram = model.gram([rec.cls for rec in active])
            if not is_negative_definite(gram):
                return NotPseudoeffective("negative part support is not negative definite")
            coeffs = _solve_negative_part(model, d, active)
            if any(a < 0 for a in coeffs):
                return NotPseudoeffective("negative coefficient in the negative part")
            p = d
            for a, rec in zip(coeffs, active):
                p = p - a * rec.cls
        names = {rec.label for rec in active}
        offending = [rec for rec in catalog
                     if rec.label not in names and model.intersect(p, rec.cls) < 0]
        if not offending:
            break
        if any(rec.self_intersection >= 0 for rec in offending):
            return NotPseudoeffective("negative against a curve of nonnegative self-intersection")
        active.extend(offending)
    else:  # pragma: no cover - the active set is bounded by the catalog size
        raise AssertionError("active set failed to stabilize")
    if model.intersect(p, p) < 0:
        return NotPseudoeffective("positive part has negative square")
    if model.intersect(p, model.f + model.g) < 0:
        return NotPseudoeffective("positive part is negative against f+g")
    rank = {rec.label: i for i, rec in enumerate(model.catalog)}
    neg = sorted(zip((rec.label for rec in active), coeffs), key=lambda t: rank[t[0]])
    return ZariskiDecomposition(positive_part=p, negative_part=dict(neg))


def volume(model: SurfaceModel, d: DivisorClass) -> Fraction:
    zd = zariski(model, d)
    if isinstance(zd, NotPseudoeffective):
        return Fraction(0)
    return model.intersect(zd.positive_part, zd.positive_part)


def positivity_report(model: SurfaceModel, d: DivisorClass) -> PositivityReport:
    zd = zariski(model, d)
    pseff = not isinstance(zd, NotPseudoeffective)
    vol = model.intersect(zd.positive_part, zd.positive_part) if pseff else Fraction(0)
    return PositivityReport(
        is_pseff=pseff,
        is_nef=is_nef(model, d),
        is_ample=is_ample(model, d),
        volume=vol,
        decomposition=zd if pseff else None,
    )


@dataclass(frozen=True)
class Chamber:
    """One Zariski chamber along ``L - xZ``: ``P(x) = p0 + x * p1`` on ``[lo, hi]``."""

    lo: Fraction
    hi: Fraction
    active: tuple[str, ...]
    p0: DivisorClass
    p1: DivisorClass
    quadratic: tuple[Fraction, Fraction, Fraction] = field(default=(Fraction(0),) * 3)

    def positive_part(self, x: Fraction) -> DivisorClass:
        return self.p0 + Fraction(x) * self.p1

    def volume(self, x: Fraction) -> Fraction:
        q0, q1, q2 = self.quadratic
        x = Fraction(x)
        return q0 + q1 * x + q2 * x * x


def _affine_positive_part(model, L, Z, active):
    """P(x) = p0 + x p1 and coefficient slopes for a fixed active set."""
    if not active:
        return L, -Z, [], []
    gram = model.gram([rec.cls for rec in active])
    if not is_negative_definite(gram):
        raise ArithmeticError("chamber support is not negative definite")
    a0 = solve(gram, [model.intersect(L, rec.cls) for rec in active])
    a1 = solve(gram, [-model.intersect(Z, rec.cls) for rec in active])
    p0, p1 = L, -Z
    for c0, c1, rec in zip(a0, a1, active):
        p0 = p0 - c0 * rec.cls
        p1 = p1 - c1 * rec.cls
    return p0, p1, a0, a1


def ray_chambers(model: SurfaceModel, L: DivisorClass, Z: DivisorClass) -> list[Chamber]:
    """Walk Zariski chambers of ``L - xZ`` from ``x = 0`` until the volume vanishes.

    Requires ``L`` big.  Raises :class:`UnboundedRay` if the volume stays
    positive for all ``x >= 0``.
    """
    zd = zariski(model, L)
    if isinstance(zd, NotPseudoeffective):
        raise ValueError(f"L is not pseudoeffective: {zd.reason}")
    if model.intersect(zd.positive_part, zd.positive_part) <= 0:
        raise ValueError("L must be big (positive volume)")
    by_label = {rec.label: rec for rec in model.catalog}
    active = [by_label[lab] for lab in zd.negative_part]
    x = Fraction(0)
    chambers: list[Chamber] = []
    for _ in range(4 * len(model.catalog) + 4):
        # settle the active set valid just to the right of x
        for _ in range(2 * len(model.catalog) + 2):
            p0, p1, a0, a1 = _affine_positive_part(model, L, Z, active)
            names = {rec.label for rec in active}
            px = p0 + x * p1
            joining = [rec for rec in model.negative_curves() if rec.label not in names
                       and model.intersect(p1, rec.cls) < 0
                       and model.intersect(px, rec.cls) == 0]
            leaving = [rec for rec, c0, c1 in zip(active, a0, a1) if c0 + x * c1 == 0 and c1 < 0]
            if not joining and not leaving:
                break
            drop = {rec.label for rec in leaving}
            active = [rec for rec in active if rec.label not in drop] + joining
        else:  # pragma: no cover
            raise AssertionError("active set failed to settle")

        names = {rec.label for rec in active}
        q0 = model.intersect(p0, p0)
        q1 = 2 * model.intersect(p0, p1)
        q2 = model.intersect(p1, p1)
        events: list[Fraction] = []
        for rec in model.catalog:
            if rec.label in names:
                continue
            v0 = model.intersect(p0, rec.cls)
            v1 = model.intersect(p1, rec.cls)
            if v1 < 0:
                events.append(-v0 / v1)
        for c0, c1 in zip(a0, a1):
            if c1 < 0:
                events.append(-c0 / c1)
        nxt = min((e for e in events if e > x), default=None)
        if q0 == 0 and q1 == 0 and q2 == 0:
            roots = []
        elif nxt is not None and q0 + q1 * nxt + q2 * nxt * nxt > 0:
            # vol is non-increasing along the ray, so it cannot vanish before nxt
            roots = []
        else:
            roots = [t for t in quadratic_roots(q0, q1, q2) if t > x]
        end = min(roots, default=None)
        quad = (q0, q1, q2)
        if end is not None and (nxt is None or end <= nxt):
            chambers.append(Chamber(x, end, tuple(sorted(names)), p0, p1, quad))
            return chambers
        if nxt is None:
            raise UnboundedRay("volume stays positive along the whole ray")
        chambers.append(Chamber(x, nxt, tuple(sorted(names)), p0, p1, quad))
        x = nxt
    raise AssertionError("chamber walk did not terminate")  # pragma: no cover


def pseff_threshold(model: SurfaceModel, L: DivisorClass, Z: DivisorClass) -> Fraction:
    """tau(L, Z) = sup{x >= 0 : L - xZ pseudoeffective}, for big ``L``."""
    return ray_chambers(model, L, Z)[-1].hi


def seshadri(model: SurfaceModel, L: DivisorClass, Z: DivisorClass) -> Fraction:
    """sigma(L, Z) = sup{x : L - xZ ample}, for ample ``L``."""
    if not is_ample(model, L):
        raise ValueError("L must be ample")
    linear = []
    for rec in model.catalog:
        zg = model.intersect(Z, rec.cls)
        if zg > 0:
            linear.append(model.intersect(L, rec.cls) / zg)
    bound = min(linear, default=None)
    q0 = model.intersect(L, L)
    q1 = -2 * model.intersect(L, Z)
    q2 = model.intersect(Z, Z)

    def q(x):
        return q0 + q1 * x + q2 * x * x

    if bound is not None and q(bound) >= 0:
        # concave or monotone on [0, bound]: positive at both ends suffices
        vertex = -q1 / (2 * q2) if q2 > 0 else None
        if vertex is None or not 0 < vertex < bound or q(vertex) > 0:
            return bound
    roots = [t for t in quadratic_roots(q0, q1, q2) if t > 0] if (q1 or q2) else []
    if not roots:
        if bound is None:
            raise UnboundedRay("L - xZ stays ample for all x >= 0")
        return bound
    return min([roots[0]] + ([bound] if bound is not None else []))
