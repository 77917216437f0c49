"""Command-line front end.

Every subcommand builds a report dict, renders it as JSON (``"schema": 1``)
or as a plain table, and writes it to ``--output`` or standard output.

Exit codes: 0 success or certified, 1 verification failed or a soundness
violation was found, 2 bad input.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .exact import fmt_rational, parse_rational
from .kstab import CERTIFIED, sweep, verify_theorem_main
from .lattice import ModelError, ModelParams, SurfaceModel, build_model, model_to_dict, params_from_dict
from .lc_local import (CRITERIA, LocalData, NonTerminationError, SoundnessViolation, config_from_dict,
                       fuzz_criteria, oracle_is_lc)
from .positivity import NotPseudoeffective, UnboundedRay, volume, zariski
from .vanishing import finite_k_ord, s_bound, volume_profile

SCHEMA = 1
EXIT_OK, EXIT_FAILED, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _rat(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _vec(cls) -> list[str]:
    return [fmt_rational(c) for c in cls.coefficients]


# ---------------------------------------------------------------------------
# model loading


def load_model(args) -> SurfaceModel:
    if args.model is not None:
        try:
            data = json.loads(Path(args.model).read_text())
        except OSError as exc:
            raise InputError(f"cannot read model file: {exc}") from None
        except json.JSONDecodeError as exc:
            raise InputError(f"model file is not valid JSON: {exc}") from None
        params = params_from_dict(data)
    else:
        if args.r is None or args.beta is None:
            raise InputError("give --model FILE or both --r and --beta")
        if args.blown is not None:
            blown = tuple(x for x in args.blown.split(",") if x.strip())
        elif args.r == 0:
            blown = ()
        else:
            blown = ModelParams.default_blown(args.r, args.blow_zero)
        params = ModelParams(args.r, blown, args.beta)
    return build_model(params)


def _model_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("model")
    g.add_argument("--model", metavar="FILE", help="JSON model file with keys r, blown, beta")
    g.add_argument("--r", type=int, help="number of blown-up points (0 for bare P1xP1)")
    g.add_argument("--beta", type=_rat, help="cone angle parameter, e.g. 1/100")
    g.add_argument("--blown", help="comma-separated point labels; default 1..r")
    g.add_argument("--blow-zero", action="store_true", help="default blown set {0, 1..r-1}")


# ---------------------------------------------------------------------------
# subcommands; each returns (report, exit code)


def cmd_model(args):
    model = load_model(args)
    return model_to_dict(model), EXIT_OK


def cmd_intersect(args):
    model = load_model(args)
    a, b = model.parse_class(args.A), model.parse_class(args.B)
    return {"A": args.A, "B": args.B, "value": fmt_rational(model.intersect(a, b))}, EXIT_OK


def cmd_zariski(args):
    model = load_model(args)
    d = model.parse_class(args.D)
    zd = zariski(model, d)
    if isinstance(zd, NotPseudoeffective):
        return {"class": args.D, "pseudoeffective": False, "reason": zd.reason}, EXIT_OK
    p = zd.positive_part
    return {
        "class": args.D,
        "pseudoeffective": True,
        "positive_part": _vec(p),
        "negative_part": {k: fmt_rational(v) for k, v in zd.negative_part.items()},
        "volume": fmt_rational(model.intersect(p, p)),
    }, EXIT_OK


def cmd_vol(args):
    model = load_model(args)
    return {"class": args.D, "volume": fmt_rational(volume(model, model.parse_class(args.D)))}, EXIT_OK


def cmd_profile(args):
    model = load_model(args)
    prof = volume_profile(model, model.parse_class(args.L), model.parse_class(args.Z))
    return {
        "L": args.L, "Z": args.Z,
        "tau": fmt_rational(prof.tau), "sigma": fmt_rational(prof.sigma),
        "segments": [{"x_lo": fmt_rational(s.x_lo), "x_hi": fmt_rational(s.x_hi),
                      "q": [fmt_rational(s.q0), fmt_rational(s.q1), fmt_rational(s.q2)]}
                     for s in prof.segments],
        "integral": fmt_rational(prof.integral()),
    }, EXIT_OK


def cmd_ord_bound(args):
    model = load_model(args)
    ob = s_bound(model, model.parse_class(args.L), model.parse_class(args.Z))
    return {
        "L": args.L, "Z": args.Z,
        "tau": fmt_rational(ob.tau), "sigma": fmt_rational(ob.sigma),
        "integral": fmt_rational(ob.integral), "bound": fmt_rational(ob.bound),
        "asymptote": None if ob.asymptote is None else fmt_rational(ob.asymptote),
    }, EXIT_OK


def cmd_finite_k(args):
    rec = finite_k_ord(args.a, args.b, args.axis, args.k)
    return {"a": args.a, "b": args.b, "k": rec.k, "axis": args.axis, "d_k": rec.d_k,
            "tau_k": rec.tau_k, "ord_value": fmt_rational(rec.ord_value)}, EXIT_OK


def cmd_lc_criteria(args):
    d = LocalData(args.a, args.b, args.m, args.BO, args.CO, not args.tangent)
    out = {}
    for name, fn in CRITERIA.items():
        try:
            v = fn(d)
            out[name] = {"verdict": v.verdict, "witness": v.witness}
        except ValueError as exc:
            out[name] = {"verdict": "error", "witness": str(exc)}
    return {"local_data": {"a": fmt_rational(d.a), "b": fmt_rational(d.b), "m": fmt_rational(d.m),
                           "BO": fmt_rational(d.BO), "CO": fmt_rational(d.CO),
                           "transversal": d.transversal},
            "criteria": out}, EXIT_OK


def cmd_lc_oracle(args):
    try:
        data = json.loads(Path(args.germ).read_text())
    except OSError as exc:
        raise InputError(f"cannot read germ file: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"germ file is not valid JSON: {exc}") from None
    try:
        cfg = config_from_dict(data)
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed germ file: {exc}") from None
    try:
        v = oracle_is_lc(cfg, args.depth_cap)
    except NonTerminationError as exc:
        return {"verdict": "nonterminating", "witness": str(exc)}, EXIT_FAILED
    return {"verdict": v.verdict, "witness": v.witness}, EXIT_OK


def cmd_fuzz(args):
    try:
        rep = fuzz_criteria(args.seed, args.trials)
    except SoundnessViolation as exc:
        return {"seed": args.seed, "trials": args.trials, "violations": 1,
                "counterexample": json.loads(str(exc))}, EXIT_FAILED
    return {"seed": args.seed, **rep.to_dict()}, EXIT_OK


def cmd_verify(args):
    model = load_model(args)
    cert = verify_theorem_main(model.params)
    return cert.to_dict(), EXIT_OK if cert.verdict == CERTIFIED else EXIT_FAILED


def _parse_r_range(text: str) -> list[int]:
    try:
        if "-" in text:
            lo, hi = text.split("-", 1)
            return list(range(int(lo), int(hi) + 1))
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise InputError(f"bad r range {text!r}; use e.g. 7-12 or 7,9") from None


def cmd_sweep(args):
    rs = _parse_r_range(args.r_range)
    if args.betas:
        betas = [_rat(b) for b in args.betas.split(",")]
    else:
        betas = lambda r: [Fraction(1, 10 * r)]  # noqa: E731
    entries = sweep(rs, betas, both_configurations=not args.no_blow_zero)
    ok = all(e.certificate is not None and e.certificate.verdict == CERTIFIED for e in entries)
    return {"entries": [e.to_dict() for e in entries], "all_certified": ok}, EXIT_OK if ok else EXIT_FAILED


# ---------------------------------------------------------------------------
# rendering


def _table(report: dict, command: str) -> str:
    lines = []
    if command == "verify":
        lines.append(f"r={report['r']} beta={report['beta']} blown={','.join(report['blown'])} "
                     f"lambda={report['lambda']}")
        lines.append(f"verdict: {report['verdict']}  margin: {report['margin']}  "
                     f"required: {report['required_margin']}")
        for lab, row in report["ord_table"].items():
            lines.append(f"  ord {lab:<6} tau={row['tau']:<10} sigma={row['sigma']:<12} bound={row['bound']}")
        for claim in report["claims"]:
            lines.append(f"claim {claim['claim_id']} [{claim['locus']}]: {'pass' if claim['verdict'] else 'FAIL'}")
            for chk in claim["checks"]:
                mark = "ok  " if chk["pass"] else "FAIL"
                tag = " (crude)" if chk["fidelity"] else ""
                lines.append(f"  {mark} {chk['paper_anchor']}{tag}  slack={chk['slack']}")
        return "\n".join(lines) + "\n"
    if command == "sweep":
        for e in report["entries"]:
            extra = e.get("margin") or e.get("error", "")
            lines.append(f"r={e['r']:<3} beta={e['beta']:<10} blown={','.join(e['blown']):<24} "
                         f"{e['verdict']:<10} {extra}")
        lines.append(f"all_certified: {report['all_certified']}")
        return "\n".join(lines) + "\n"
    _flatten(report, "", lines)
    return "\n".join(lines) + "\n"


def _flatten(obj, prefix: str, lines: list[str]) -> None:
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(v, f"{prefix}.{k}" if prefix else str(k), lines)
    elif isinstance(obj, list) and any(isinstance(v, (dict, list)) for v in obj):
        for i, v in enumerate(obj):
            _flatten(v, f"{prefix}[{i}]", lines)
    elif isinstance(obj, list):
        lines.append(f"{prefix}: {' '.join(str(v) for v in obj)}")
    else:
        lines.append(f"{prefix}: {obj}")


def render(report: dict, command: str, fmt: str) -> str:
    if fmt == "json":
        body = {"schema": SCHEMA, "command": command, **report}
        return json.dumps(body, sort_keys=True, indent=2) + "\n"
    return _table(report, command)


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "table"), default="table")
    common.add_argument("--output", "-o", metavar="PATH", help="write the report here instead of stdout")

    parser = argparse.ArgumentParser(prog="blct-surf", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_, model=True):
        p = sub.add_parser(name, parents=[common], help=help_)
        if model:
            _model_args(p)
        p.set_defaults(func=fn)
        return p

    add("model", cmd_model, "print the model, its basis and curve catalog")
    p = add("intersect", cmd_intersect, "intersection number A.B")
    p.add_argument("A")
    p.add_argument("B")
    p = add("zariski", cmd_zariski, "Zariski decomposition of D")
    p.add_argument("D")
    p = add("vol", cmd_vol, "volume of D")
    p.add_argument("D")
    p = add("profile", cmd_profile, "piecewise volume of L - xZ")
    p.add_argument("L")
    p.add_argument("Z")
    p = add("ord-bound", cmd_ord_bound, "asymptotic bound on ord_Z of a basis divisor of L")
    p.add_argument("L")
    p.add_argument("Z")
    p = add("finite-k", cmd_finite_k, "exact finite-k ord on P1xP1 for O(a,b)", model=False)
    p.add_argument("a", type=int)
    p.add_argument("b", type=int)
    p.add_argument("k", type=int)
    p.add_argument("--axis", choices=("f", "g"), default="f", help="fiber class to filter by")
    p = add("lc-criteria", cmd_lc_criteria, "run the four local lc criteria", model=False)
    for name in ("a", "b", "m", "BO", "CO"):
        p.add_argument(f"--{name}", type=_rat, required=True)
    p.add_argument("--tangent", action="store_true", help="B and C are not transversal at p")
    p = add("lc-oracle", cmd_lc_oracle, "exact lc verdict for a germ file", model=False)
    p.add_argument("germ", metavar="GERM_FILE")
    p.add_argument("--depth-cap", type=int, default=None)
    p = add("fuzz", cmd_fuzz, "soundness fuzz of the criteria against the oracle", model=False)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--trials", type=int, default=1000)
    add("verify", cmd_verify, "certificate for blct >= 1 + beta/100")
    p = add("sweep", cmd_sweep, "certificates over a grid of r and beta", model=False)
    p.add_argument("--r", dest="r_range", default="7-12", help="range such as 7-12 or list 7,9")
    p.add_argument("--betas", help="comma-separated betas; default 1/(10r) for each r")
    p.add_argument("--no-blow-zero", action="store_true", help="skip the configurations with 0 blown up")
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        report, code = args.func(args)
    except (InputError, ModelError, ValueError, KeyError, ArithmeticError) as exc:
        if isinstance(exc, UnboundedRay):
            msg = f"unbounded: {exc}"
        else:
            msg = str(exc) if not isinstance(exc, KeyError) else f"unknown key {exc}"
        print(f"blct-surf: error: {msg}", file=sys.stderr)
        return EXIT_INPUT
    text = render(report, args.command, args.format)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())
