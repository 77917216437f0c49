"""Volume profiles along rays and the resulting vanishing-order bounds.

``s_bound`` integrates the exact piecewise-quadratic profile
``x -> vol(L - xZ)`` over ``[0, tau]`` and divides by ``L^2``; this is the
asymptotic upper bound for ``ord_Z`` of a k-basis divisor, up to a term that
vanishes as k grows.  ``finite_k_ord`` computes the exact finite-k filtration
sum on P^1 x P^1, where no such error term appears.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .lattice import DivisorClass, ModelParams, SurfaceModel, build_model
from .positivity import is_ample, ray_chambers, seshadri


@dataclass(frozen=True)
class Segment:
    x_lo: Fraction
    x_hi: Fraction
    q0: Fraction
    q1: Fraction
    q2: Fraction

    def value(self, x) -> Fraction:
        x = Fraction(x)
        return self.q0 + self.q1 * x + self.q2 * x * x

    def antiderivative(self, x) -> Fraction:
        x = Fraction(x)
        return self.q0 * x + self.q1 * x * x / 2 + self.q2 * x ** 3 / 3

    def integral(self) -> Fraction:
        return self.antiderivative(self.x_hi) - self.antiderivative(self.x_lo)


@dataclass(frozen=True)
class VolumeProfile:
    segments: tuple[Segment, ...]
    tau: Fraction
    sigma: Fraction

    def value(self, x) -> Fraction:
        x = Fraction(x)
        if x < 0:
            raise ValueError("profile is defined for x >= 0")
        if x >= self.tau:
            return Fraction(0)
        for seg in self.segments:
            if seg.x_lo <= x <= seg.x_hi:
                return seg.value(x)
        raise AssertionError("segments do not cover [0, tau]")  # pragma: no cover

    def integral(self) -> Fraction:
        return sum((seg.integral() for seg in self.segments), Fraction(0))

    @property
    def breakpoints(self) -> tuple[Fraction, ...]:
        return tuple(seg.x_lo for seg in self.segments) + (self.tau,)


@dataclass(frozen=True)
class OrdBound:
    tau: Fraction
    sigma: Fraction
    integral: Fraction
    bound: Fraction
    asymptote: Fraction | None
    margin: Fraction = Fraction(0)


@dataclass(frozen=True)
class FiniteKRecord:
    k: int
    d_k: int
    tau_k: int
    summands: tuple[int, ...]
    ord_value: Fraction


def volume_profile(model: SurfaceModel, L: DivisorClass, Z: DivisorClass) -> VolumeProfile:
    if not is_ample(model, L):
        raise ValueError("L must be ample")
    chambers = ray_chambers(model, L, Z)
    segs = tuple(Segment(c.lo, c.hi, *c.quadratic) for c in chambers)
    return VolumeProfile(segs, chambers[-1].hi, seshadri(model, L, Z))


def leading_asymptote(model: SurfaceModel, L: DivisorClass, Z: DivisorClass) -> Fraction | None:
    """Leading-order bound for ord_Z when ``L = -K_beta`` and Z is a named curve."""
    if model.r < 5 or L != model.anticanonical_log:
        return None
    r, beta = model.r, model.beta
    if Z == model.f:
        return Fraction(1, 2) - beta * (r - 4) / 8
    if Z == model.class_of("C"):
        return beta / 2
    for lab in model.slots:
        if Z in (model.class_of(f"E{lab}"), model.class_of(f"F{lab}")):
            return Fraction(1, 2) - beta * (r - 6) / 8
    return None


def s_bound(model: SurfaceModel, L: DivisorClass, Z: DivisorClass,
            margin: Fraction = Fraction(0)) -> OrdBound:
    profile = volume_profile(model, L, Z)
    integral = profile.integral()
    bound = integral / model.intersect(L, L)
    return OrdBound(profile.tau, profile.sigma, integral, bound,
                    leading_asymptote(model, L, Z), Fraction(margin))


def toric_h0(a: int, b: int) -> int:
    """h^0(P^1 x P^1, O(a, b))."""
    if a < 0 or b < 0:
        return 0
    return (a + 1) * (b + 1)


def finite_k_ord(a: int, b: int, fiber_axis: str = "f", k: int = 1) -> FiniteKRecord:
    """Maximal ord of a k-basis divisor of O(a, b) along a fiber, by direct counting.

    ``fiber_axis="f"`` filters by a (1,0)-fiber (lowering the first degree),
    ``"g"`` by a (0,1)-fiber.
    """
    if a <= 0 or b <= 0:
        raise ValueError(f"O({a},{b}) is not ample")
    if k < 1:
        raise ValueError("k must be >= 1")
    if fiber_axis not in ("f", "g"):
        raise ValueError(f"fiber_axis must be 'f' or 'g', got {fiber_axis!r}")
    ka, kb = k * a, k * b
    d_k = toric_h0(ka, kb)
    if fiber_axis == "f":
        tau_k = ka
        summands = tuple(toric_h0(ka - j, kb) for j in range(1, tau_k + 1))
        assert toric_h0(ka - tau_k - 1, kb) == 0
    else:
        tau_k = kb
        summands = tuple(toric_h0(ka, kb - j) for j in range(1, tau_k + 1))
        assert toric_h0(ka, kb - tau_k - 1) == 0
    return FiniteKRecord(k, d_k, tau_k, summands, Fraction(sum(summands), k * d_k))


@dataclass(frozen=True)
class AsymptoteRatio:
    ratio: Fraction | None
    deviation1: Fraction
    deviation2: Fraction

    @property
    def exact_match(self) -> bool:
        return self.ratio is None


def two_point_ratio(dev1: Fraction, dev2: Fraction) -> AsymptoteRatio:
    if dev1 == 0 and dev2 == 0:
        return AsymptoteRatio(None, dev1, dev2)
    if dev2 == 0:
        raise ZeroDivisionError("deviation vanishes at beta/2 only")
    return AsymptoteRatio(abs(dev1) / abs(dev2), dev1, dev2)


def asymptote_check(r: int, z_label: str, beta1, beta2=None, blown=None,
                    asymptote: Callable[[SurfaceModel], Fraction] | None = None) -> AsymptoteRatio:
    """|bound - asymptote| at beta1 over the same at beta1/2.

    A quadratic error term gives a ratio near 4.  ``asymptote`` overrides the
    built-in leading-order table (it receives the model at each beta).
    """
    beta1 = Fraction(beta1)
    beta2 = beta1 / 2 if beta2 is None else Fraction(beta2)
    if beta2 != beta1 / 2:
        raise ValueError("beta2 must equal beta1/2")
    blown = ModelParams.default_blown(r) if blown is None else tuple(blown)
    devs = []
    for beta in (beta1, beta2):
        model = build_model(ModelParams(r, blown, beta))
        L = model.anticanonical_log
        Z = model.class_of(z_label)
        ob = s_bound(model, L, Z)
        target = asymptote(model) if asymptote is not None else ob.asymptote
        if target is None:
            raise ValueError(f"no asymptote known for Z={z_label!r}")
        devs.append(ob.bound - target)
    return two_point_ratio(*devs)
