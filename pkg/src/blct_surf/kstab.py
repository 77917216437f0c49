"""Instance certificates for the blct lower bound on I.9B.r.

For a fixed rational beta the lc argument for ``(S, (1-beta)C + lambda D)``
with ``lambda = 1 + beta/100`` is split over six loci of S.  Every step of
that argument is an explicit inequality in beta, lambda, r and the vanishing
orders ``ord_Z D``.  Here each inequality is evaluated exactly with the
vanishing orders ranging over ``[0, s_bound(Z)]``: the remaining dependence
on ``ord_C D`` is at most quadratic, so the worst case over that interval is
found exactly and the reported slack is a true minimum.

A certificate is issued when every check holds with slack at least
``beta / 10**6``; the fixed positive margin absorbs the finite-k error term of
the vanishing-order bound for all large k.
"""
from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable

from .exact import fmt_rational, interpolate_quadratic, minimize_quadratic, parse_rational
from .lattice import INF, ModelError, ModelParams, SurfaceModel, build_model
from .vanishing import OrdBound, s_bound

SCHEMA = 1
MARGIN_DIVISOR = 10**6

CERTIFIED = "certified"
FAILED = "failed"


def lambda_of(beta) -> Fraction:
    beta = Fraction(beta)
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    return 1 + beta / 100


@dataclass(frozen=True)
class Check:
    description: str
    paper_anchor: str
    left: Fraction
    relation: str
    right: Fraction
    slack: Fraction
    passed: bool
    worst_ord_C: Fraction | None = None
    fidelity: bool = False

    def to_dict(self) -> dict:
        d = {
            "description": self.description,
            "paper_anchor": self.paper_anchor,
            "left": fmt_rational(self.left),
            "relation": self.relation,
            "right": fmt_rational(self.right),
            "slack": fmt_rational(self.slack),
            "pass": self.passed,
            "fidelity": self.fidelity,
        }
        if self.worst_ord_C is not None:
            d["worst_ord_C"] = fmt_rational(self.worst_ord_C)
        return d


@dataclass(frozen=True)
class ClaimReport:
    claim_id: int
    locus: str
    checks: tuple[Check, ...]

    @property
    def verdict(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"claim_id": self.claim_id, "locus": self.locus, "verdict": self.verdict,
                "checks": [c.to_dict() for c in self.checks]}


@dataclass(frozen=True)
class Certificate:
    r: int
    beta: Fraction
    blown: tuple[str, ...]
    lam: Fraction
    ord_table: dict[str, OrdBound]
    claims: tuple[ClaimReport, ...]
    margin: Fraction
    required_margin: Fraction
    verdict: str

    def failing_checks(self) -> list[tuple[int, Check]]:
        return [(c.claim_id, chk) for c in self.claims for chk in c.checks if not chk.passed]

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "kind": "certificate",
            "r": self.r,
            "beta": fmt_rational(self.beta),
            "blown": list(self.blown),
            "lambda": fmt_rational(self.lam),
            "ord_table": {
                lab: {"tau": fmt_rational(ob.tau), "sigma": fmt_rational(ob.sigma),
                      "integral": fmt_rational(ob.integral), "bound": fmt_rational(ob.bound),
                      "asymptote": None if ob.asymptote is None else fmt_rational(ob.asymptote)}
                for lab, ob in self.ord_table.items()
            },
            "claims": [c.to_dict() for c in self.claims],
            "margin": fmt_rational(self.margin),
            "required_margin": fmt_rational(self.required_margin),
            "verdict": self.verdict,
            "semantics": "blct_inf(S, (1-beta)C, -K_beta) >= lambda; uniformly log K-stable if lambda > 1",
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


# ---------------------------------------------------------------------------
# ord table


def ord_table(model: SurfaceModel) -> dict[str, OrdBound]:
    """s_bound of -K_beta along every curve the claims refer to."""
    L = model.anticanonical_log
    table = {"f": s_bound(model, L, model.f), "C": s_bound(model, L, model.class_of("C"))}
    for lab in model.slots:
        table[f"E{lab}"] = s_bound(model, L, model.class_of(f"E{lab}"))
        table[f"F{lab}"] = s_bound(model, L, model.class_of(f"F{lab}"))
    return table


# ---------------------------------------------------------------------------
# checks


class _Ctx:
    def __init__(self, model: SurfaceModel, table: dict[str, OrdBound]):
        if model.r < 7:
            raise ModelError(f"the certificate pipeline needs r >= 7, got r={model.r}")
        missing = [k for k in ("f", "C") if k not in table]
        missing += [f"{x}{lab}" for lab in model.slots for x in "EF" if f"{x}{lab}" not in table]
        if missing:
            raise KeyError(f"ord_table is missing {missing}")
        self.model = model
        self.r = model.r
        self.beta = model.beta
        self.lam = lambda_of(model.beta)
        self.table = table
        self.floor = model.beta / MARGIN_DIVISOR
        self.uC = table["C"].bound
        self.uf = table["f"].bound
        self.uE = max(table[f"E{lab}"].bound for lab in model.slots)
        self.uF = max(table[f"F{lab}"].bound for lab in model.slots)

    def const(self, desc: str, anchor: str, left, right, fidelity: bool = False) -> Check:
        left, right = Fraction(left), Fraction(right)
        slack = right - left
        return Check(desc, anchor, left, "<=", right, slack, slack >= self.floor, None, fidelity)

    def over_ordC(self, desc: str, anchor: str, left: Callable[[Fraction], Fraction],
                  right: Callable[[Fraction], Fraction], hi: Fraction | None = None,
                  fidelity: bool = False) -> Check:
        """``left(o) <= right(o)`` for every ord_C D = o in [0, hi]; both sides of degree <= 2."""
        hi = self.uC if hi is None else hi
        coeffs = interpolate_quadratic(lambda o: right(o) - left(o), Fraction(0), hi / 2, hi)
        # guard: the interpolant must reproduce the slack elsewhere
        probe = hi / 3
        assert coeffs[0] + coeffs[1] * probe + coeffs[2] * probe**2 == right(probe) - left(probe), desc
        o, slack = minimize_quadratic(coeffs, Fraction(0), hi)
        return Check(desc, anchor, left(o), "<=", right(o), slack, slack >= self.floor, o, fidelity)


def _claim1(x: _Ctx) -> ClaimReport:
    b, lam = x.beta, x.lam
    return ClaimReport(1, "S minus (C and all E_i, F_i)", (
        x.const("Z.Delta = 2 beta lambda <= 1 (Z a smooth fiber through p)",
                "2*beta*lambda <= 1", 2 * b * lam, 1),
    ))


def _claim2(x: _Ctx) -> ClaimReport:
    b, lam = x.beta, x.lam
    return ClaimReport(2, "E_i, F_i minus C", (
        x.const("E_i.Delta = lambda (beta + ord_E D) <= 1",
                "lambda*(beta + ord_E D) <= 1", lam * (b + x.uE), 1),
        x.const("F_i.Delta = lambda (beta + ord_F D) <= 1",
                "lambda*(beta + ord_F D) <= 1", lam * (b + x.uF), 1),
    ))


def _cleared_ineq(b: Fraction, lam: Fraction, o: Fraction) -> Fraction:
    t = b - o
    return t * ((lam - 1) * (1 - b) - lam * t) + b * (lam - 1)


def _claim3(x: _Ctx) -> ClaimReport:
    b, lam = x.beta, x.lam
    zero = lambda o: Fraction(0)  # noqa: E731
    return ClaimReport(3, "C minus (p_0, p_inf and all E_i, F_i)", (
        x.over_ordC("mult_p Omega <= (Z.Omega)_p <= 2 lambda (beta - ord_C D) <= 1",
                    "mult_p Omega <= (Z.Omega)_p <= 2*lambda*(beta - ord_C D) <= 1", lambda o: 2 * lam * (b - o), lambda o: Fraction(1)),
        x.over_ordC("boundary coefficient of C: lambda ord_C D <= beta",
                    "lambda*ord_C D <= beta", lambda o: lam * o, lambda o: b),
        x.const("coefficient of Z: lambda ord_Z D <= 1", "lambda*ord_Z D <= 1",
                lam * x.uf, 1),
        x.over_ordC("(beta-ord_C D)((lambda-1)(1-beta) - lambda(beta-ord_C D)) + beta(lambda-1) <= 0",
                    "(beta-o)*((lambda-1)*(1-beta) - lambda*(beta-o)) + beta*(lambda-1) <= 0, o = ord_C D", lambda o: _cleared_ineq(b, lam, o), zero),
        x.over_ordC("the cleared inequality with the crude bound ord_C D <= 2 beta/3",
                    "same, with ord_C D <= 2*beta/3", lambda o: _cleared_ineq(b, lam, o), zero,
                    hi=2 * b / 3, fidelity=True),
    ))


def _claim4(x: _Ctx) -> ClaimReport:
    b, lam, r = x.beta, x.lam, x.r
    u = max(x.uE, x.uF)
    return ClaimReport(4, "C meets E_i or F_i", (
        x.over_ordC("mult_p Omega <= 2 lambda (beta - ord_C D) <= 1",
                    "mult_p Omega <= 2*lambda*(beta - ord_C D) <= 1", lambda o: 2 * lam * (b - o), lambda o: Fraction(1)),
        x.over_ordC("boundary coefficient of C: lambda ord_C D <= beta",
                    "lambda*ord_C D <= beta", lambda o: lam * o, lambda o: b),
        x.const("coefficient of E_i: lambda ord_E D <= 1", "lambda*ord_Z D <= 1", lam * u, 1),
        x.over_ordC("(lambda-1)(2 beta - ord_C D) <= (r-6)/2 (beta - ord_C D)(beta(2 lambda-1) - lambda ord_C D)",
                    "(lambda-1)*(2*beta-o)/(beta*(2*lambda-1)-lambda*o) <= (r-6)/2*(beta-o), o = ord_C D",
                    lambda o: (lam - 1) * (2 * b - o),
                    lambda o: Fraction(r - 6, 2) * (b - o) * (b * (2 * lam - 1) - lam * o)),
        x.const("crude final step: (beta/100) * 6 <= (r-6)/2 * beta/3",
                "3*beta/50 <= beta/6", b / 100 * 6, Fraction(r - 6, 2) * b / 3,
                fidelity=True),
    ))


def _final_cor35(x: _Ctx, anchor: str) -> Check:
    b, lam = x.beta, x.lam
    return x.over_ordC(
        "3 + (beta - lambda ord_C D) <= lambda(beta - ord_C D)/((lambda-1) beta) * beta/10",
        anchor,
        lambda o: 3 + (b - lam * o),
        lambda o: lam * (b - o) / ((lam - 1) * b) * b / 10)


def _claim5(x: _Ctx, point: str) -> ClaimReport:
    b, lam, r, uf = x.beta, x.lam, x.r, x.uf
    one = lambda o: Fraction(1)  # noqa: E731
    m = lambda o: 2 * lam * (b - o)  # noqa: E731
    mt = lambda o: lam * (b - o)  # noqa: E731
    g_coef = lambda o: lam * uf + m(o) - b + lam * o  # noqa: E731
    h_coef = lambda o: 2 * lam * uf + 2 * lam * (b - o) - 2 * b + 2 * lam * o  # noqa: E731
    return ClaimReport(5, f"C meets F_{point} tangentially ({point} not blown up)", (
        x.over_ordC("m <= 2 lambda (beta - ord_C D) <= 1", "m <= 2*lambda*(beta - ord_C D) <= 1", m, one),
        x.over_ordC("coefficient of G: lambda ord_F D + m - beta + lambda ord_C D <= 1",
                    "lambda*ord_F D + m - beta + lambda*ord_C D <= 1", g_coef, one),
        x.over_ordC("tilde m <= lambda (beta - ord_C D) <= 1", "tilde m <= lambda*(beta - ord_C D) <= 1", mt, one),
        x.over_ordC("coefficient of H: 2 lambda ord_F D + m + tilde m - 2 beta + 2 lambda ord_C D <= 1",
                    "2*lambda*ord_F D + m + tilde m - 2*beta + 2*lambda*ord_C D <= 1", h_coef, one),
        x.over_ordC("at H meets F_0: lambda ord_F D + tilde m <= 1",
                    "lambda*ord_F0 D + tilde m <= 1", lambda o: lam * uf + mt(o), one),
        x.over_ordC("at H meets G: lambda ord_F D + m + tilde m - beta + lambda ord_C D <= 1",
                    "lambda*ord_F0 D + m + tilde m - beta + lambda*ord_C D <= 1",
                    g_coef, one),
        x.over_ordC("coefficient of H <= 1 - beta/10",
                    "coefficient of H <= 1 - beta/10", h_coef, lambda o: 1 - b / 10),
        x.over_ordC("C.Omega = lambda(2 + beta(4-r) - 2 ord_F D + (r-4) ord_C D) <= 3",
                    "(C.Omega)_o <= C.Omega <= 3",
                    lambda o: lam * (2 + b * (4 - r) + (r - 4) * o), lambda o: Fraction(3)),
        x.over_ordC("boundary coefficient of C: lambda ord_C D <= beta",
                    "lambda*ord_C D <= beta", lambda o: lam * o, lambda o: b),
        _final_cor35(x, "3 + (beta - lambda*ord_C D) <= lambda*(beta - ord_C D)/((lambda-1)*beta) * beta/10"),
        x.const("crude final step: 3 + beta <= 10/3", "3 + beta <= 10/3",
                3 + b, Fraction(10, 3), fidelity=True),
    ))


def _claim6(x: _Ctx, point: str) -> ClaimReport:
    b, lam, r = x.beta, x.lam, x.r
    uE0 = x.table[f"E{point}"].bound
    uF0 = x.table[f"F{point}"].bound
    one = lambda o: Fraction(1)  # noqa: E731
    m = lambda o: lam * (b - o)  # noqa: E731
    coef = lambda o: lam * uE0 + lam * uF0 + m(o) - b + lam * o  # noqa: E731
    return ClaimReport(6, f"C meets F_{point} transversally ({point} blown up)", (
        x.over_ordC("m <= lambda (beta - ord_C D) <= 1", "m <= lambda*(beta - ord_C D) <= 1", m, one),
        x.over_ordC("coefficient of G: lambda ord_E0 D + lambda ord_F0 D + m - beta + lambda ord_C D <= 1",
                    "lambda*ord_E0 D + lambda*ord_F0 D + m - beta + lambda*ord_C D <= 1", coef, one),
        x.over_ordC("at G meets E_0: lambda ord_E0 D + m <= 1",
                    "lambda*ord_E0 D + m <= 1", lambda o: lam * uE0 + m(o), one),
        x.over_ordC("at G meets F_0: lambda ord_F0 D + m <= 1",
                    "lambda*ord_F0 D + m <= 1", lambda o: lam * uF0 + m(o), one),
        x.over_ordC("coefficient of G <= 1 - beta/10",
                    "coefficient of G <= 1 - beta/10", coef, lambda o: 1 - b / 10),
        x.over_ordC("C.Omega = lambda(2 + beta(4-r) - ord_E0 D - ord_F0 D + (r-4) ord_C D) <= 3",
                    "(C.Omega)_q <= C.Omega <= 3",
                    lambda o: lam * (2 + b * (4 - r) + (r - 4) * o), lambda o: Fraction(3)),
        x.over_ordC("boundary coefficient of C: lambda ord_C D <= beta",
                    "lambda*ord_C D <= beta", lambda o: lam * o, lambda o: b),
        _final_cor35(x, "3 + (beta - lambda*ord_C D) <= lambda*(beta - ord_C D)/((lambda-1)*beta) * beta/10"),
        x.const("crude final step: 3 + beta <= 10/3", "3 + beta <= 10/3",
                3 + b, Fraction(10, 3), fidelity=True),
    ))


def verify_claim(model: SurfaceModel, claim_id: int, table: dict[str, OrdBound],
                 point: str = "0") -> ClaimReport:
    """Evaluate one claim; ``point`` selects p_0 or p_inf for claims 5 and 6."""
    if claim_id not in range(1, 7):
        raise ValueError(f"claim_id must be in 1..6, got {claim_id}")
    x = _Ctx(model, table)
    if claim_id == 1:
        return _claim1(x)
    if claim_id == 2:
        return _claim2(x)
    if claim_id == 3:
        return _claim3(x)
    if claim_id == 4:
        return _claim4(x)
    blown = point in model.params.blown
    if claim_id == 5:
        if blown:
            raise ValueError(f"claim 5 needs the point {point} unblown")
        return _claim5(x, point)
    if not blown:
        raise ValueError(f"claim 6 needs the point {point} blown up")
    return _claim6(x, point)


def verify_theorem_main(params: ModelParams) -> Certificate:
    if params.r < 7:
        raise ModelError(f"the certificate pipeline needs r >= 7, got r={params.r}")
    model = build_model(params)
    table = ord_table(model)
    claims = [verify_claim(model, i, table) for i in (1, 2, 3, 4)]
    for point in ("0", INF):
        tangent = model.record(f"F{point}").tangency_to_C == 2
        claims.append(verify_claim(model, 5 if tangent else 6, table, point))
    margin = min(chk.slack for c in claims for chk in c.checks)
    floor = model.beta / MARGIN_DIVISOR
    ok = all(c.verdict for c in claims) and margin >= floor
    return Certificate(params.r, params.beta, params.blown, lambda_of(params.beta), table,
                       tuple(claims), margin, floor, CERTIFIED if ok else FAILED)


# ---------------------------------------------------------------------------
# sweeps


@dataclass
class SweepEntry:
    r: int
    beta: Fraction
    blown: tuple[str, ...]
    certificate: Certificate | None = None
    error: str | None = None

    def to_dict(self) -> dict:
        d = {"r": self.r, "beta": fmt_rational(self.beta), "blown": list(self.blown)}
        if self.certificate is not None:
            d["verdict"] = self.certificate.verdict
            d["margin"] = fmt_rational(self.certificate.margin)
        else:
            d["verdict"] = "error"
            d["error"] = self.error
        return d


def _run_entry(job: tuple[int, Fraction, tuple[str, ...]]) -> SweepEntry:
    r, beta, blown = job
    try:
        return SweepEntry(r, beta, blown, verify_theorem_main(ModelParams(r, blown, beta)))
    except (ModelError, ValueError, KeyError, ArithmeticError) as exc:
        return SweepEntry(r, beta, blown, None, f"{type(exc).__name__}: {exc}")


def worker_count() -> int:
    raw = os.environ.get("BLCT_SURF_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"BLCT_SURF_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValueError(f"BLCT_SURF_THREADS must be a positive integer, got {raw!r}")
    return n


def sweep(r_range: Iterable[int], beta_list, both_configurations: bool = True) -> list[SweepEntry]:
    """Certificates over a grid of (r, beta) in both tangency configurations.

    ``beta_list`` is a list of rationals or a callable ``r -> list``.
    Errors are collected per entry.
    """
    jobs = []
    for r in r_range:
        betas = beta_list(r) if callable(beta_list) else beta_list
        variants = (False, True) if both_configurations else (False,)
        for beta in betas:
            for blow_zero in variants:
                blown = ModelParams.default_blown(r, blow_zero) if r >= 1 else ()
                jobs.append((r, parse_rational(beta), blown))
    n = worker_count()
    if n == 1 or len(jobs) < 2:
        return [_run_entry(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(_run_entry, jobs))


def slack_sign_changes(r: int, betas: Iterable, blown: tuple[str, ...] | None = None) -> dict[str, list[str]]:
    """For each check, the betas (in the given order) at which its pass flag flips."""
    blown = ModelParams.default_blown(r) if blown is None else blown
    history: dict[str, list[tuple[Fraction, bool]]] = {}
    for beta in betas:
        beta = parse_rational(beta)
        cert = verify_theorem_main(ModelParams(r, blown, beta))
        for c in cert.claims:
            for i, chk in enumerate(c.checks):
                key = f"claim{c.claim_id}[{c.locus}]#{i}: {chk.description}"
                history.setdefault(key, []).append((beta, chk.passed))
    flips = {}
    for key, seq in history.items():
        changes = [fmt_rational(b2) for (b1, p1), (b2, p2) in zip(seq, seq[1:]) if p1 != p2]
        if changes:
            flips[key] = changes
    return flips
