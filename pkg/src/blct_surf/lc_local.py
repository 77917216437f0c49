"""Local log canonicity on surfaces.

Two independent routes:

* sufficient criteria phrased through local intersection numbers at a point
  (inversion of adjunction and its refinements with one or two boundary
  curves); they answer ``lc`` or ``inapplicable`` and never ``not_lc``;
* an exact oracle that blows up infinitely-near points of a configuration of
  smooth curve germs until the boundary has simple normal crossings.

``fuzz_criteria`` checks the first route against the second.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .exact import fmt_rational, parse_rational

LC = "lc"
NOT_LC = "not_lc"
INAPPLICABLE = "inapplicable"


class NonTerminationError(RuntimeError):
    """The blow-up recursion exceeded its depth cap."""


class SoundnessViolation(AssertionError):
    """A criterion claimed lc where the oracle found a non-lc pair."""


@dataclass(frozen=True)
class LcVerdict:
    verdict: str
    witness: str = ""

    @property
    def is_lc(self) -> bool:
        return self.verdict == LC


@dataclass(frozen=True)
class LocalData:
    a: Fraction
    b: Fraction
    m: Fraction
    BO: Fraction
    CO: Fraction
    transversal: bool = True

    def __post_init__(self):
        for name in ("a", "b", "m", "BO", "CO"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.m < 0 or self.BO < 0 or self.CO < 0:
            raise ValueError("m, (B.Omega)_p and (C.Omega)_p must be nonnegative")


def _pos(x: Fraction) -> Fraction:
    return x if x > 0 else Fraction(0)


def _ratio_bound(num: Fraction, den: Fraction, a: Fraction, b: Fraction) -> Fraction | None:
    """num/(den)_+ * (1-a) - b, with None standing for +infinity."""
    d = _pos(den)
    if d == 0:
        return None
    return num / d * (1 - a) - b


def criterion_adjunction(d: LocalData) -> LcVerdict:
    """(S, aC + Omega) is lc at p when (C.Omega)_p <= 1."""
    if not 0 <= d.a <= 1:
        raise ValueError("a must lie in [0, 1]")
    if d.CO <= 1:
        return LcVerdict(LC, f"(C.Omega)_p = {d.CO} <= 1")
    return LcVerdict(INAPPLICABLE, f"(C.Omega)_p = {d.CO} > 1")


def criterion_mult_refined(d: LocalData) -> LcVerdict:
    """(C.Omega)_p <= 2 - a when mult_p Omega <= 1, and <= 1 otherwise."""
    if not 0 <= d.a <= 1:
        raise ValueError("a must lie in [0, 1]")
    limit = 2 - d.a if d.m <= 1 else Fraction(1)
    if d.CO <= limit:
        return LcVerdict(LC, f"(C.Omega)_p = {d.CO} <= {limit} (m = {d.m})")
    return LcVerdict(INAPPLICABLE, f"(C.Omega)_p = {d.CO} > {limit} (m = {d.m})")


def criterion_two_curves(d: LocalData) -> LcVerdict:
    """Local inequality for (S, (1-b)B + aC + Omega) with B, C transversal at p."""
    if not d.transversal:
        return LcVerdict(INAPPLICABLE, "B and C are not transversal at p")
    if not (0 <= d.a < 1 and 0 <= d.b < 1):
        raise ValueError("a and b must lie in [0, 1)")
    a, b, m = d.a, d.b, d.m
    if m == 0:
        return LcVerdict(LC, "Omega misses p")
    if m > 1:
        if d.BO <= 1 - a:
            return LcVerdict(LC, f"m > 1 and (B.Omega)_p = {d.BO} <= 1 - a")
        return LcVerdict(INAPPLICABLE, f"m > 1 and (B.Omega)_p = {d.BO} > 1 - a")
    if not (a + d.CO - b <= 1 or a + m <= 1):
        return LcVerdict(INAPPLICABLE, "neither a + (C.Omega)_p - b <= 1 nor a + m <= 1")
    bound = _ratio_bound(m, m - b, a, b)
    if bound is None or d.BO <= bound:
        return LcVerdict(LC, f"(B.Omega)_p = {d.BO} <= {'inf' if bound is None else bound}")
    return LcVerdict(INAPPLICABLE, f"(B.Omega)_p = {d.BO} > {bound}")


def criterion_two_curves_clean(d: LocalData) -> LcVerdict:
    """Same pair, with the multiplicity replaced by (C.Omega)_p in the bound."""
    if not d.transversal:
        return LcVerdict(INAPPLICABLE, "B and C are not transversal at p")
    if not (0 <= d.a <= 1 and 0 <= d.b <= 1):
        raise ValueError("a and b must lie in [0, 1]")
    a, b, m = d.a, d.b, d.m
    if d.CO == 0:
        return LcVerdict(LC, "(C.Omega)_p = 0")
    if m > 1:
        if d.BO <= 1 - a:
            return LcVerdict(LC, f"m > 1 and (B.Omega)_p = {d.BO} <= 1 - a")
        return LcVerdict(INAPPLICABLE, f"m > 1 and (B.Omega)_p = {d.BO} > 1 - a")
    if m == 0:
        return LcVerdict(INAPPLICABLE, "m = 0 but (C.Omega)_p > 0 is inconsistent")
    bound = _ratio_bound(d.CO, d.CO - b, a, b)
    if bound is None or d.BO <= bound:
        return LcVerdict(LC, f"(B.Omega)_p = {d.BO} <= {'inf' if bound is None else bound}")
    return LcVerdict(INAPPLICABLE, f"(B.Omega)_p = {d.BO} > {bound}")


CRITERIA = {
    "adjunction": criterion_adjunction,
    "mult_refined": criterion_mult_refined,
    "two_curves": criterion_two_curves,
    "two_curves_clean": criterion_two_curves_clean,
}


# ---------------------------------------------------------------------------
# germ configurations


@dataclass(frozen=True)
class GermBranch:
    path: tuple[str, ...]
    coefficient: Fraction
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "path", tuple(str(n) for n in self.path))
        object.__setattr__(self, "coefficient", Fraction(self.coefficient))
        if not self.path:
            raise ValueError("a branch passes through at least its root point")
        if self.coefficient < 0:
            raise ValueError("branch coefficients must be nonnegative")


@dataclass(frozen=True)
class GermConfiguration:
    """Smooth branches through a tree of infinitely-near points.

    ``parent`` maps each node to its parent (``None`` for points of the
    surface itself).  A branch passes through the free points listed in its
    path; after its last node it continues through a private general point.
    ``exceptional_coeffs`` records nodes already blown up and the
    coefficient of their exceptional curve.
    """

    parent: Mapping[str, str | None]
    branches: tuple[GermBranch, ...]
    exceptional_coeffs: Mapping[str, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "parent", dict(self.parent))
        object.__setattr__(self, "branches", tuple(self.branches))
        object.__setattr__(self, "exceptional_coeffs",
                           {k: Fraction(v) for k, v in self.exceptional_coeffs.items()})
        for br in self.branches:
            if br.path[0] not in self.parent:
                raise ValueError(f"unknown node {br.path[0]!r}")
            if self.parent[br.path[0]] is not None and self.parent[br.path[0]] not in self.exceptional_coeffs:
                raise ValueError(f"branch must start at a root point, got {br.path[0]!r}")
            for u, v in zip(br.path, br.path[1:]):
                if self.parent.get(v) != u:
                    raise ValueError(f"{v!r} is not a child of {u!r}")

    @classmethod
    def from_paths(cls, branches: Iterable[tuple[Sequence[str], Fraction]]) -> "GermConfiguration":
        parent: dict[str, str | None] = {}
        brs = []
        for i, (path, coef) in enumerate(branches):
            path = tuple(str(n) for n in path)
            for j, node in enumerate(path):
                want = path[j - 1] if j else None
                if node in parent and parent[node] != want:
                    raise ValueError(f"node {node!r} has two parents")
                parent[node] = want
            brs.append(GermBranch(path, coef, f"b{i}"))
        return cls(parent, tuple(brs))

    def children(self, node: str) -> list[str]:
        return [c for c, p in self.parent.items() if p == node]

    def through(self, node: str) -> list[GermBranch]:
        return [br for br in self.branches if node in br.path]


def germ_intersection(cfg: GermConfiguration, i: int, j: int) -> int:
    """Local intersection of two smooth branches: the number of shared cluster points."""
    if i == j:
        raise ValueError("germ_intersection needs two different branches")
    a, b = cfg.branches[i], cfg.branches[j]
    return len(set(a.path) & set(b.path))


def intersection_with(cfg: GermConfiguration, i: int, others: Iterable[int]) -> Fraction:
    """(B_i . sum_j c_j B_j) with coefficients."""
    return sum((cfg.branches[j].coefficient * germ_intersection(cfg, i, j) for j in others), Fraction(0))


def default_depth_cap(cfg: GermConfiguration) -> int:
    total = sum(germ_intersection(cfg, i, j) for i, j in combinations(range(len(cfg.branches)), 2))
    return 4 * total + 8


def _frontier(cfg: GermConfiguration) -> list[str]:
    """Points still to examine: unblown nodes lying on the surface or on an exceptional curve."""
    return [n for n, p in cfg.parent.items()
            if n not in cfg.exceptional_coeffs and (p is None or p in cfg.exceptional_coeffs)]


def _components(cfg: GermConfiguration, node: str) -> list[tuple[str, Fraction, tuple[str, ...]]]:
    """Boundary components through ``node``: (name, coefficient, path after node)."""
    comps = []
    p = cfg.parent[node]
    if p is not None:
        comps.append((f"E[{p}]", cfg.exceptional_coeffs[p], ()))
    for br in cfg.branches:
        if node in br.path and br.coefficient != 0:
            k = br.path.index(node)
            comps.append((br.name or "branch", br.coefficient, br.path[k + 1:]))
    return comps


def blow_up(cfg: GermConfiguration, node: str) -> GermConfiguration:
    """Blow up a frontier point; the new exceptional curve gets mult - 1."""
    if node not in _frontier(cfg):
        raise ValueError(f"{node!r} is not a point of the current surface")
    mu = sum((c for _, c, _ in _components(cfg, node)), Fraction(0))
    coeffs = dict(cfg.exceptional_coeffs)
    coeffs[node] = mu - 1
    return replace(cfg, exceptional_coeffs=coeffs)


def _is_snc_point(comps) -> bool:
    if len(comps) > 2:
        return False
    if len(comps) == 2:
        # two smooth components are transversal unless they share the next point
        t1, t2 = comps[0][2], comps[1][2]
        if t1 and t2 and t1[0] == t2[0]:
            return False
    return True


def oracle_is_lc(cfg: GermConfiguration, depth_cap: int | None = None) -> LcVerdict:
    """Exact lc verdict for the pair defined by ``cfg`` along all of its cluster points."""
    cap = default_depth_cap(cfg) if depth_cap is None else depth_cap
    for br in cfg.branches:
        if br.coefficient > 1:
            return LcVerdict(NOT_LC, f"branch {br.name} has coefficient {br.coefficient} > 1")
    for node, c in cfg.exceptional_coeffs.items():
        if c > 1:
            return LcVerdict(NOT_LC, f"exceptional curve over {node} has coefficient {c} > 1")
    return _oracle(cfg, cap, 0, ())


def _oracle(cfg: GermConfiguration, cap: int, depth: int, trail: tuple[str, ...]) -> LcVerdict:
    # Blow-ups at distinct points commute, so one non-snc point is resolved
    # per step and the recursion depth counts blow-ups.
    if depth > cap:
        raise NonTerminationError(f"blow-up count exceeded cap {cap} after {'/'.join(trail)}")
    for node in sorted(_frontier(cfg)):
        comps = _components(cfg, node)
        if _is_snc_point(comps):
            continue
        up = blow_up(cfg, node)
        c = up.exceptional_coeffs[node]
        path = trail + (node,)
        if c > 1:
            return LcVerdict(NOT_LC, f"blow-up path {'/'.join(path)}: exceptional coefficient {c} > 1")
        return _oracle(up, cap, depth + 1, path)
    return LcVerdict(LC, f"simple normal crossings reached; blown up {'/'.join(trail) or 'nothing'}")


# ---------------------------------------------------------------------------
# serialization


def config_to_dict(cfg: GermConfiguration) -> dict:
    return {
        "edges": [[p, n] for n, p in cfg.parent.items() if p is not None],
        "roots": [n for n, p in cfg.parent.items() if p is None],
        "branches": [{"name": br.name, "path": list(br.path), "coefficient": fmt_rational(br.coefficient)}
                     for br in cfg.branches],
        "exceptional": {k: fmt_rational(v) for k, v in cfg.exceptional_coeffs.items()},
    }


def config_from_dict(data: Mapping) -> GermConfiguration:
    parent: dict[str, str | None] = {str(n): None for n in data.get("roots", ())}
    for p, n in data.get("edges", ()):
        if str(n) in parent and parent[str(n)] is not None:
            raise ValueError(f"node {n!r} has two parents")
        parent[str(n)] = str(p)
        parent.setdefault(str(p), None)
    branches = tuple(
        GermBranch(tuple(b["path"]), parse_rational(b["coefficient"]), b.get("name", f"b{i}"))
        for i, b in enumerate(data.get("branches", ()))
    )
    for br in branches:
        for node in br.path:
            parent.setdefault(node, None)
    exc = {k: parse_rational(v) for k, v in data.get("exceptional", {}).items()}
    return GermConfiguration(parent, branches, exc)


def dumps_config(cfg: GermConfiguration) -> str:
    return json.dumps(config_to_dict(cfg), sort_keys=True)


# ---------------------------------------------------------------------------
# soundness fuzzing


@dataclass
class FuzzReport:
    trials: int
    applicable: dict[str, int]
    oracle_lc: int
    violations: int = 0

    def to_dict(self) -> dict:
        return {"trials": self.trials, "applicable": dict(self.applicable),
                "oracle_lc": self.oracle_lc, "violations": self.violations}


def _random_fraction(rng: random.Random, hi: Fraction, den: int = 12) -> Fraction:
    top = int(hi * den)
    return Fraction(rng.randint(0, top), den)


def random_configuration(rng: random.Random) -> tuple[GermConfiguration, int, int]:
    """B and C transverse at the root ``p`` plus a few weighted Omega branches.

    Returns the configuration and the indices of B and C (coefficients of B
    and C are placeholders, set per criterion).
    """
    def walk(prefix: list[str], extra: int) -> list[str]:
        path = list(prefix)
        for _ in range(extra):
            kids = [c for c, par in parent.items() if par == path[-1]]
            if kids and rng.random() < 0.7:
                path.append(rng.choice(kids))
            else:
                node = f"{path[-1]}.{len([k for k in kids])}"
                parent[node] = path[-1]
                path.append(node)
        return path

    parent: dict[str, str | None] = {"p": None}
    b_path = walk(["p"], rng.randint(0, 3))
    c_path = ["p"]
    # C leaves p in a direction different from B
    node = "p.c"
    parent[node] = "p"
    c_path.append(node)
    c_path = walk(c_path, rng.randint(0, 2))
    paths = [b_path, c_path]
    for _ in range(rng.randint(0, 4)):
        anchor = rng.choice([b_path, c_path, ["p"]])
        k = rng.randint(1, len(anchor))
        paths.append(walk(anchor[:k], rng.randint(0, 3)))
    coeffs = [Fraction(0), Fraction(0)]
    for _ in paths[2:]:
        coeffs.append(_random_fraction(rng, Fraction(3, 4), rng.choice([4, 6, 12, 20])))
    branches = tuple(GermBranch(tuple(pth), c, name)
                     for pth, c, name in zip(paths, coeffs, ["B", "C"] + [f"W{i}" for i in range(len(paths) - 2)]))
    return GermConfiguration(parent, branches), 0, 1


def local_data(cfg: GermConfiguration, ib: int, ic: int, a: Fraction, b: Fraction) -> LocalData:
    omega = [i for i in range(len(cfg.branches)) if i not in (ib, ic)]
    m = sum((cfg.branches[i].coefficient for i in omega if cfg.branches[i].path[0] == cfg.branches[ib].path[0]),
            Fraction(0))
    transversal = germ_intersection(cfg, ib, ic) == 1
    return LocalData(a, b, m, intersection_with(cfg, ib, omega), intersection_with(cfg, ic, omega), transversal)


def _with_coeffs(cfg: GermConfiguration, coeffs: Mapping[int, Fraction]) -> GermConfiguration:
    brs = tuple(replace(br, coefficient=coeffs.get(i, br.coefficient)) for i, br in enumerate(cfg.branches))
    return replace(cfg, branches=brs)


def check_configuration(cfg: GermConfiguration, ib: int, ic: int, a: Fraction, b: Fraction) -> dict[str, tuple[LcVerdict, LcVerdict]]:
    """Run every applicable criterion and the oracle on the matching pair.

    Returns criterion name -> (criterion verdict, oracle verdict).
    """
    d = local_data(cfg, ib, ic, a, b)
    out: dict[str, tuple[LcVerdict, LcVerdict]] = {}
    one_curve = _with_coeffs(cfg, {ib: Fraction(0), ic: a})
    two_curve = _with_coeffs(cfg, {ib: 1 - b, ic: a})
    oracle_one = oracle_is_lc(one_curve)
    oracle_two = oracle_is_lc(two_curve)
    out["adjunction"] = (criterion_adjunction(d), oracle_one)
    out["mult_refined"] = (criterion_mult_refined(d), oracle_one)
    if a < 1 and b < 1:
        out["two_curves"] = (criterion_two_curves(d), oracle_two)
    out["two_curves_clean"] = (criterion_two_curves_clean(d), oracle_two)
    return out


def fuzz_criteria(seed: int = 1, trials: int = 1000) -> FuzzReport:
    """Random soundness test of every criterion against the oracle.

    Raises :class:`SoundnessViolation` carrying the serialized configuration
    when a criterion says lc and the oracle disagrees.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = random.Random(seed)
    applicable = {name: 0 for name in CRITERIA}
    oracle_lc = 0
    for _ in range(trials):
        cfg, ib, ic = random_configuration(rng)
        a = _random_fraction(rng, Fraction(1), rng.choice([4, 8, 10]))
        b = _random_fraction(rng, Fraction(1), rng.choice([4, 8, 10]))
        results = check_configuration(cfg, ib, ic, a, b)
        if results["two_curves_clean"][1].is_lc:
            oracle_lc += 1
        for name, (crit, oracle) in results.items():
            if crit.is_lc:
                applicable[name] += 1
                if not oracle.is_lc:
                    payload = {"criterion": name, "a": fmt_rational(a), "b": fmt_rational(b),
                               "witness": crit.witness, "oracle": oracle.witness,
                               "configuration": config_to_dict(cfg)}
                    raise SoundnessViolation(json.dumps(payload, sort_keys=True))
    return FuzzReport(trials, applicable, oracle_lc, 0)
