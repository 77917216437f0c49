"""Acceptance criteria, each checked exactly and within its runtime budget.

Run under pytest (the per-criterion lines appear in the terminal summary) or
directly with ``python tests/test_acceptance.py``.
"""
from __future__ import annotations

import random
import sys
import time
from fractions import Fraction
from typing import Callable

import pytest

from blct_surf.exact import is_negative_definite
from blct_surf.kstab import CERTIFIED, FAILED, verify_theorem_main
from blct_surf.lattice import ModelParams, baseline_model, build_model
from blct_surf.lc_local import LC, NOT_LC, GermConfiguration, fuzz_criteria, oracle_is_lc
from blct_surf.positivity import NotPseudoeffective, is_nef, pseff_threshold, seshadri, volume, zariski
from blct_surf.vanishing import asymptote_check, finite_k_ord, s_bound

F = Fraction
R_RANGE = range(7, 13)
TABLE_BETAS = (F(1, 100), F(1, 256))


def table_models():
    for r in R_RANGE:
        for beta in TABLE_BETAS:
            for blow_zero in (False, True):
                yield build_model(ModelParams(r, ModelParams.default_blown(r, blow_zero), beta))


def criterion_1() -> str:
    n = 0
    for m in table_models():
        b, r = m.beta, m.r
        L = m.anticanonical_log
        lab = m.slots[0]  # the tangency point 0 when it is blown up, else 1
        expected = {
            "f": (F(1), 1 - b * (r - 4) / 2),
            "C": (b, b),
            f"e{lab}": (F(1), b),
            f"F{lab}": (F(1), b),
        }
        for z, (tau, sigma) in expected.items():
            Z = m.class_of(z)
            assert pseff_threshold(m, L, Z) == tau, (r, b, m.params.blown, z)
            assert seshadri(m, L, Z) == sigma, (r, b, m.params.blown, z)
            n += 1
    return f"{n} (tau, sigma) pairs exact"


def criterion_2() -> str:
    ratios = []
    for z in ("f", "C", "e1", "F1"):
        res = asymptote_check(7, z, F(1, 100))
        assert res.ratio is not None and 3 <= res.ratio <= 5, (z, res)
        ratios.append(f"{z}:{float(res.ratio):.3f}")
    # the alternative leading term for f must lose
    alt = asymptote_check(7, "f", F(1, 100), asymptote=lambda m: F(1, 2) - (m.r - 4) * m.beta / 2)
    assert not 3 <= alt.ratio <= 5
    return "ratios " + " ".join(ratios) + f"; statement beats proof variant (ratio {float(alt.ratio):.3f})"


def criterion_3() -> str:
    b = baseline_model(F(1, 10))
    for axis in ("f", "g"):
        sb = s_bound(b, b.f + b.g, b.class_of(axis)).bound
        assert sb == F(1, 2)
        for k in range(1, 51):
            assert finite_k_ord(1, 1, axis, k).ord_value == F(1, 2) == sb
    return "finite-k ord = s_bound = 1/2 for k = 1..50"


def criterion_4() -> str:
    n = 0
    for m in table_models():
        b, r = m.beta, m.r
        L = m.anticanonical_log
        assert volume(m, L) == 4 * b - b * b * (r - 4)
        assert volume(m, L - m.class_of("E1")) == 0
        for lab in m.slots:
            assert volume(m, m.class_of(f"F{lab}") + m.class_of("C")) == 0
        n += 1
    return f"{n} models"


def _oracle_family(threshold: Fraction, paths) -> None:
    def cfg(c):
        return GermConfiguration.from_paths([(p, c) for p in paths])

    assert oracle_is_lc(cfg(threshold)).verdict == LC
    assert oracle_is_lc(cfg(threshold + F(1, 1000))).verdict == NOT_LC


def criterion_5() -> str:
    _oracle_family(F(1), [["p"]])
    _oracle_family(F(1), [["p", "x"], ["p", "y"]])
    _oracle_family(F(2, 3), [["p", "x"], ["p", "y"], ["p", "z"]])
    _oracle_family(F(3, 4), [["p", "t", "x"], ["p", "t", "y"]])
    return "smooth 1, node 1, triple 2/3, tacnode 3/4"


def criterion_6() -> str:
    rep = fuzz_criteria(seed=1, trials=1000)
    assert rep.violations == 0
    counts = ", ".join(f"{k}={v}" for k, v in rep.applicable.items())
    return f"1000 trials, 0 violations; lc verdicts: {counts}"


def criterion_7() -> str:
    for r in R_RANGE:
        for blow_zero in (False, True):
            cert = verify_theorem_main(ModelParams(r, ModelParams.default_blown(r, blow_zero), F(1, 10 * r)))
            assert cert.verdict == CERTIFIED, (r, blow_zero, cert.failing_checks())
            floor = cert.beta / 10**6
            assert all(chk.slack >= floor for c in cert.claims for chk in c.checks)
    cert = verify_theorem_main(ModelParams(7, ModelParams.default_blown(7), F(199, 300)))
    assert cert.verdict == FAILED
    negative = [(cid, chk.paper_anchor) for cid, chk in cert.failing_checks() if chk.slack < 0]
    assert negative
    return f"12 certified; r=7 beta=199/300 failed at claim {negative[0][0]}: {negative[0][1]}"


def _random_pseff(m, rng) -> object:
    d = rng.randint(0, 3) * m.anticanonical_log
    for rec in m.catalog:
        if rng.random() < 0.4:
            d = d + F(rng.randint(0, 12), rng.choice([1, 2, 3, 4, 7])) * rec.cls
    return d


ZARISKI_MODELS = (
    ModelParams(7, ModelParams.default_blown(7), F(1, 100)),
    ModelParams(7, ModelParams.default_blown(7, True), F(1, 100)),
    ModelParams(12, ModelParams.default_blown(12), F(1, 256)),
    ModelParams(0, (), F(1, 10)),
)


def criterion_8() -> str:
    rng = random.Random(1)
    supports = 0
    for params in ZARISKI_MODELS:
        m = build_model(params)
        for _ in range(500):
            d = _random_pseff(m, rng)
            zd = zariski(m, d)
            assert not isinstance(zd, NotPseudoeffective)
            P = zd.positive_part
            N = [m.class_of(lab) for lab in zd.negative_part]
            assert is_nef(m, P)
            assert all(m.intersect(P, n) == 0 for n in N)
            if N:
                assert is_negative_definite(m.gram(N))
                supports += 1
            assert volume(m, d) == m.intersect(P, P)
            order = list(m.catalog)
            rng.shuffle(order)
            assert zariski(m, d, order=order) == zd
    return f"{500 * len(ZARISKI_MODELS)} classes on {len(ZARISKI_MODELS)} models, {supports} with nonzero negative part"


CRITERIA: list[tuple[int, str, Callable[[], str], float]] = [
    (1, "threshold tables", criterion_1, 1.0),
    (2, "ord-bound asymptotics", criterion_2, 1.0),
    (3, "toric exactness", criterion_3, 1.0),
    (4, "volume facts", criterion_4, 1.0),
    (5, "classical lct oracle", criterion_5, 1.0),
    (6, "criteria soundness fuzz", criterion_6, 30.0),
    (7, "certificates", criterion_7, 10.0),
    (8, "Zariski property suite", criterion_8, 10.0),
]


def run_criterion(num: int, name: str, fn: Callable[[], str], budget: float) -> tuple[bool, str]:
    start = time.perf_counter()
    try:
        detail = fn()
        ok = True
    except AssertionError as exc:
        detail, ok = f"assertion failed: {exc!r}", False
    elapsed = time.perf_counter() - start
    if ok and elapsed >= budget:
        ok, detail = False, f"{detail}; over budget"
    status = "PASS" if ok else "FAIL"
    return ok, f"[{status}] criterion {num} ({name}): {detail} [{elapsed:.2f}s / budget {budget:g}s]"


@pytest.mark.parametrize("num,name,fn,budget", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_acceptance(num, name, fn, budget, acceptance_log):
    ok, line = run_criterion(num, name, fn, budget)
    print(line)
    acceptance_log(line)
    assert ok, line


if __name__ == "__main__":
    results = [run_criterion(*c) for c in CRITERIA]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
