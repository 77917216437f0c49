"""Picard lattice of the surfaces I.9B.r and of the bare P^1 x P^1.

The basis is fixed as ``(f, g, e_1, ..., e_r)``: ``f`` is the pullback of a
(1,0)-line, ``g`` of a (0,1)-line and ``e_j`` the exceptional curve over the
j-th blown-up point.  Blown-up labels are strings drawn from
``"0", "1", ..., str(r), "inf"``; they are assigned to e-slots in the order
0 < 1 < ... < r < inf.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .exact import fmt_rational, parse_rational

INF = "inf"


class ModelError(ValueError):
    """Invalid model parameters or an unknown divisor label."""


def _label_key(label: str, r: int) -> int:
    if label == INF:
        return r + 1
    return int(label)


def normalize_label(label: str | int) -> str:
    s = str(label).strip().lower()
    if s in ("inf", "infty", "infinity", "oo"):
        return INF
    if not s.isdigit():
        raise ModelError(f"bad point label {label!r}")
    return str(int(s))


@dataclass(frozen=True)
class DivisorClass:
    """Exact coefficient vector over the lattice basis."""

    coefficients: tuple[Fraction, ...]

    def __post_init__(self):
        cs = self.coefficients
        if type(cs) is not tuple or not all(type(c) is Fraction for c in cs):
            object.__setattr__(self, "coefficients", tuple(Fraction(c) for c in cs))

    @property
    def rank(self) -> int:
        return len(self.coefficients)

    def _check(self, other: "DivisorClass") -> None:
        if not isinstance(other, DivisorClass):
            raise TypeError(f"expected DivisorClass, got {type(other).__name__}")
        if other.rank != self.rank:
            raise ModelError(f"dimension mismatch: {self.rank} vs {other.rank}")

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        self._check(other)
        return DivisorClass(tuple(a + b for a, b in zip(self.coefficients, other.coefficients)))

    def __sub__(self, other: "DivisorClass") -> "DivisorClass":
        self._check(other)
        return DivisorClass(tuple(a - b for a, b in zip(self.coefficients, other.coefficients)))

    def __neg__(self) -> "DivisorClass":
        return DivisorClass(tuple(-a for a in self.coefficients))

    def __mul__(self, scalar) -> "DivisorClass":
        if isinstance(scalar, DivisorClass):
            return NotImplemented
        s = Fraction(scalar)
        return DivisorClass(tuple(s * a for a in self.coefficients))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.coefficients)

    def __str__(self) -> str:
        return "(" + ", ".join(fmt_rational(c) for c in self.coefficients) + ")"


@dataclass(frozen=True)
class ModelParams:
    r: int
    blown: tuple[str, ...]
    beta: Fraction

    def __post_init__(self):
        object.__setattr__(self, "beta", parse_rational(self.beta))
        labels = tuple(normalize_label(x) for x in self.blown)
        if len(set(labels)) != len(labels):
            raise ModelError(f"repeated labels in blown set {labels}")
        object.__setattr__(self, "blown", tuple(sorted(labels, key=lambda s: _label_key(s, 10**9))))

    @classmethod
    def default_blown(cls, r: int, blow_zero: bool = False) -> tuple[str, ...]:
        """{1..r}, or {0, 1..r-1} when the tangency point over F_0 is blown up."""
        if blow_zero:
            return ("0",) + tuple(str(i) for i in range(1, r))
        return tuple(str(i) for i in range(1, r + 1))

    def validate(self) -> None:
        r, beta = self.r, self.beta
        if r == 0:
            if self.blown:
                raise ModelError("the P1xP1 baseline (r=0) has no blown-up points")
            if beta <= 0:
                raise ModelError("beta must be positive")
            return
        if r < 5:
            raise ModelError(f"r must be >= 5 (or 0 for the baseline), got {r}")
        if len(self.blown) != r:
            raise ModelError(f"blown set must have exactly r={r} labels, got {len(self.blown)}")
        for lab in self.blown:
            if lab != INF and not 0 <= int(lab) <= r:
                raise ModelError(f"label {lab} outside {{0, 1, ..., {r}, inf}}")
        if not 0 < beta < Fraction(2, r - 4):
            raise ModelError(f"beta={beta} outside (0, 2/(r-4)) = (0, {Fraction(2, r - 4)})")


@dataclass(frozen=True)
class CurveRecord:
    label: str
    cls: DivisorClass
    self_intersection: Fraction
    tangency_to_C: int


@dataclass(frozen=True)
class SurfaceModel:
    params: ModelParams
    catalog: tuple[CurveRecord, ...]
    anticanonical_log: DivisorClass
    slots: tuple[str, ...] = field(default=())

    @property
    def r(self) -> int:
        return self.params.r

    @property
    def beta(self) -> Fraction:
        return self.params.beta

    @property
    def rank(self) -> int:
        return 2 + self.params.r

    def basis_vector(self, i: int) -> DivisorClass:
        v = [Fraction(0)] * self.rank
        v[i] = Fraction(1)
        return DivisorClass(tuple(v))

    @property
    def f(self) -> DivisorClass:
        return self.basis_vector(0)

    @property
    def g(self) -> DivisorClass:
        return self.basis_vector(1)

    def e(self, label: str | int) -> DivisorClass:
        lab = normalize_label(label)
        try:
            return self.basis_vector(2 + self.slots.index(lab))
        except ValueError:
            raise ModelError(f"point {lab} is not blown up") from None

    def intersect(self, a: DivisorClass, b: DivisorClass) -> Fraction:
        a._check(b)
        if a.rank != self.rank:
            raise ModelError(f"class of rank {a.rank} does not live on a lattice of rank {self.rank}")
        x, y = a.coefficients, b.coefficients
        # classes are sparse; skipping zeros avoids most Fraction arithmetic
        value = Fraction(0)
        if x[0] and y[1]:
            value += x[0] * y[1]
        if x[1] and y[0]:
            value += x[1] * y[0]
        for xi, yi in zip(x[2:], y[2:]):
            if xi and yi:
                value -= xi * yi
        return value

    def record(self, label: str) -> CurveRecord:
        for rec in self.catalog:
            if rec.label == label:
                return rec
        raise ModelError(f"unknown catalog label {label!r}")

    def class_of(self, label: str) -> DivisorClass:
        """Class of a named divisor: catalog labels plus ``f``, ``g``, ``e<i>``, ``antiK``."""
        lab = label.strip()
        if lab in ("f",):
            return self.f
        if lab in ("g",):
            return self.g
        if lab in ("antiK", "-K"):
            return self.anticanonical_log
        m = re.fullmatch(r"e_?(\w+)", lab)
        if m:
            return self.e(m.group(1))
        m = re.fullmatch(r"([EFG])_?(\w+)", lab)
        if m:
            lab = m.group(1) + normalize_label(m.group(2))
        return self.record(lab).cls

    def gram(self, classes: Sequence[DivisorClass]) -> list[list[Fraction]]:
        return [[self.intersect(a, b) for b in classes] for a in classes]

    def nef_test_curves(self) -> tuple[CurveRecord, ...]:
        return self.catalog

    def negative_curves(self) -> tuple[CurveRecord, ...]:
        return tuple(rec for rec in self.catalog if rec.self_intersection < 0)

    def parse_class(self, expr: str) -> DivisorClass:
        return parse_class(self, expr)

    def tangent_points(self) -> dict[str, bool]:
        """For each of the two tangency points 0 and inf: True if it is blown up."""
        return {lab: lab in self.params.blown for lab in ("0", INF)}


def build_model(params: ModelParams) -> SurfaceModel:
    params.validate()
    r = params.r
    slots = params.blown
    zero = DivisorClass((Fraction(0),) * (2 + r))
    proto = SurfaceModel(params=params, catalog=(), anticanonical_log=zero, slots=slots)
    f, g = proto.f, proto.g
    c = f + 2 * g
    for lab in slots:
        c = c - proto.e(lab)

    records: list[CurveRecord] = []

    def add(label: str, cls: DivisorClass, tangency: int) -> None:
        records.append(CurveRecord(label, cls, proto.intersect(cls, cls), tangency))

    add("C", c, 0)
    for lab in slots:
        e = proto.e(lab)
        add(f"E{lab}", e, 1)
        add(f"F{lab}", f - e, 1)
        add(f"G{lab}", g - e, 0)
    if r:
        for lab in ("0", INF):
            if lab not in slots:
                add(f"F{lab}", f, 2)
    add("piF", f, 1)
    add("piG", g, 1)
    anti = f + params.beta * c
    return SurfaceModel(params=params, catalog=tuple(records), anticanonical_log=anti, slots=slots)


def baseline_model(beta: Fraction | str = Fraction(1, 100)) -> SurfaceModel:
    """P^1 x P^1 with no blown-up points."""
    return build_model(ModelParams(0, (), parse_rational(beta)))


def intersect(model: SurfaceModel, a: DivisorClass, b: DivisorClass) -> Fraction:
    return model.intersect(a, b)


def class_of(model: SurfaceModel, label: str) -> DivisorClass:
    return model.class_of(label)


_TERM = re.compile(r"\s*([+-])?\s*(?:([0-9]+(?:/[0-9]+)?)\s*\*?\s*)?([A-Za-z][A-Za-z_0-9]*)\s*")


def parse_class(model: SurfaceModel, expr: str) -> DivisorClass:
    """Parse label algebra such as ``"1*f + 1/100*C"`` or ``"antiK - e1"``."""
    s = expr.strip()
    if not s:
        raise ModelError("empty divisor expression")
    total = DivisorClass((Fraction(0),) * model.rank)
    pos = 0
    first = True
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos:
            raise ModelError(f"cannot parse divisor expression at {s[pos:]!r}")
        sign, coef, label = m.groups()
        if sign is None and not first:
            raise ModelError(f"missing operator before {label!r}")
        k = parse_rational(coef) if coef else Fraction(1)
        if sign == "-":
            k = -k
        total = total + k * model.class_of(label)
        pos = m.end()
        first = False
    return total


def model_to_dict(model: SurfaceModel) -> dict:
    p = model.params
    return {
        "r": p.r,
        "blown": list(p.blown),
        "beta": fmt_rational(p.beta),
        "basis": ["f", "g"] + [f"e{lab}" for lab in model.slots],
        "anticanonical_log": [fmt_rational(c) for c in model.anticanonical_log.coefficients],
        "catalog": [
            {
                "label": rec.label,
                "class": [fmt_rational(c) for c in rec.cls.coefficients],
                "self_intersection": fmt_rational(rec.self_intersection),
                "tangency_to_C": rec.tangency_to_C,
            }
            for rec in model.catalog
        ],
    }


def params_from_dict(data: dict) -> ModelParams:
    try:
        r = int(data["r"])
        blown: Iterable = data.get("blown", ())
        beta = parse_rational(data["beta"])
    except KeyError as exc:
        raise ModelError(f"model file is missing key {exc.args[0]!r}") from None
    return ModelParams(r, tuple(str(b) for b in blown), beta)
