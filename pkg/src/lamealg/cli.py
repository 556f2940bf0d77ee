"""Command-line front end: ``lamealg <subcommand> ...``.

Every subcommand prints one JSON document (keys sorted, floats rounded to 15
significant digits) or, with ``--format text``, a flat ``key: value`` listing.
Exit codes: 0 success, 1 negative verdict, 2 usage or parse error,
3 mathematically invalid input.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import re
import sys
from dataclasses import dataclass, fields, replace
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .exactalg import parse_rational, parse_rational_function
from .fuchsian import NonFuchsianError
from .lame import (
    DegenerateCurveError,
    LameParameters,
    classify_algebraic,
    classify_weierstrass,
    known_instances,
    lame_operator,
)
from .monodromy import IllConditionedClosure, IntegrationError, MonodromyConfig, even_subgroup, monodromy_group
from .pullback import (
    certificate_degree_check,
    exponent_transport,
    is_weak_pullback,
    named_certificate,
    named_maps,
)
from .schwarz import DegenerateTripleError, SchwarzTriple, entry_for_group, full_schwarz_case, normalize_triple
from .solutions import CASES, BranchCollisionError, evaluate, solution_basis

SCHEMA_VERSION = 1
CONFIG_ENV = "LAMEALG_CONFIG"

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_INVALID = 3


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    integration_tol: float = 1e-12
    match_tol: float = 1e-6
    closure_cap: int = 400
    root_residual: float = 1e-12
    output_format: str = "json"
    seed: int = 0

    def __post_init__(self):
        for name in ("integration_tol", "match_tol", "root_residual"):
            if not getattr(self, name) > 0:
                raise UsageError(f"{name} must be positive")
        if self.closure_cap < 1:
            raise UsageError("closure_cap must be positive")
        if self.output_format not in ("json", "text"):
            raise UsageError("output_format must be 'json' or 'text'")

    @classmethod
    def load(cls, path: Optional[str]) -> "RunConfig":
        """Defaults, overlaid by the JSON file at ``path`` (or $LAMEALG_CONFIG) when present."""
        path = path or os.environ.get(CONFIG_ENV)
        if not path:
            return cls()
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as err:
            raise UsageError(f"cannot read config {path}: {err}") from err
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        return cls(**data)

    def monodromy_config(self) -> MonodromyConfig:
        return MonodromyConfig(
            integration_tol=self.integration_tol,
            match_tol=self.match_tol,
            closure_cap=self.closure_cap,
            root_residual=self.root_residual,
        )


# ---------------------------------------------------------------------------
# Parsing and output helpers
# ---------------------------------------------------------------------------


def parse_complex(text: str) -> complex:
    """'a+bi', 'a', 'bi' or 'i' (j accepted too)."""
    s = text.strip().replace(" ", "").replace("i", "j")
    if s in ("j", "+j", "-j"):
        s = s.replace("j", "1j")
    try:
        return complex(s)
    except ValueError:
        raise UsageError(f"cannot parse complex number {text!r}") from None


def _q(text: Optional[str], name: str) -> Optional[Fraction]:
    if text is None:
        return None
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError, TypeError) as err:
        raise UsageError(f"--{name}: {err}") from None


def _lame_from_text(text: str) -> LameParameters:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 4:
        raise UsageError(f"--lame expects l,B,g2,g3 but got {text!r}")
    vals = [_q(p, "lame") for p in parts]
    return LameParameters(*vals)


def _triple_from_text(text: str) -> SchwarzTriple:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 3:
        raise UsageError(f"--triple expects a,b,c but got {text!r}")
    return SchwarzTriple(*(_q(p, "triple") for p in parts))


def _clean(obj):
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return None
        return float(f"{obj:.15g}")
    if isinstance(obj, complex):
        return [_clean(obj.real), _clean(obj.imag)]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def render(payload: dict, fmt: str = "json") -> str:
    doc = _clean({"schemaVersion": SCHEMA_VERSION, **payload})
    if fmt == "json":
        return json.dumps(doc, sort_keys=True, indent=2)
    lines = []

    def walk(prefix, v):
        if isinstance(v, dict):
            for k in sorted(v):
                walk(f"{prefix}.{k}" if prefix else k, v[k])
        else:
            lines.append(f"{prefix}: {json.dumps(v)}")

    walk("", doc)
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _operator_args(args, require: bool):
    vals = [_q(getattr(args, n), n) for n in ("ell", "B", "g2", "g3")]
    if require and any(v is None for v in vals):
        raise UsageError("--ell, --B, --g2 and --g3 are all required")
    return vals


def _run_monodromy(params: LameParameters, cfg: RunConfig, curve: bool):
    report = monodromy_group(lame_operator(params), cfg.monodromy_config())
    return even_subgroup(report) if curve else report


def cmd_classify(args, cfg: RunConfig):
    ell = _q(args.ell, "ell")
    verdict = classify_weierstrass(ell) if args.curve else classify_algebraic(ell)
    out = verdict.to_json()
    extra = [args.B, args.g2, args.g3]
    if any(v is not None for v in extra):
        if any(v is None for v in extra):
            raise UsageError("--B, --g2 and --g3 must be given together")
        params = LameParameters(ell, *(_q(v, n) for v, n in zip(extra, ("B", "g2", "g3"))))
        report = _run_monodromy(params, cfg, args.curve)
        out["realized"] = report.group_name
        out["realizedOrder"] = report.closure_size
        out["monodromyStatus"] = report.status
    code = EXIT_NEGATIVE if not verdict.classical and not verdict.admissible else EXIT_OK
    return code, out


def cmd_verify_pullback(args, cfg: RunConfig):
    target = _lame_from_text(args.lame) if args.lame else None
    if args.named:
        if args.named not in named_maps():
            raise UsageError(f"unknown named map {args.named!r}; known: {', '.join(sorted(named_maps()))}")
        cert = named_certificate(args.named, lame_operator(target) if target else None)
    else:
        if not (args.lame and args.triple and args.xi):
            raise UsageError("give --named, or all of --lame, --triple and --xi")
        try:
            xi = parse_rational_function(args.xi)
        except (ValueError, SyntaxError, ZeroDivisionError) as err:
            raise UsageError(f"--xi: {err}") from None
        cert = is_weak_pullback(lame_operator(target), _triple_from_text(args.triple), xi)
    out = cert.to_json()
    if cert.verified:
        checks = exponent_transport(cert)
        out["exponentTransport"] = {
            "ok": all(c.ok for c in checks),
            "points": [[c.point, c.image, c.multiplicity, str(c.expected), str(c.actual)] for c in checks],
        }
        lhs, rhs, deg = certificate_degree_check(cert)
        out["degreeFormula"] = {"lhs": str(lhs), "rhsPerDegree": str(rhs), "degree": deg, "ok": lhs == deg * rhs}
    return (EXIT_OK if cert.verified else EXIT_NEGATIVE), out


def cmd_monodromy(args, cfg: RunConfig):
    ell, B, g2, g3 = _operator_args(args, True)
    if args.tol is not None:
        cfg = replace(cfg, integration_tol=args.tol)
    if args.match_tol is not None:
        cfg = replace(cfg, match_tol=args.match_tol)
    if args.cap is not None:
        cfg = replace(cfg, closure_cap=args.cap)
    params = LameParameters(ell, B, g2, g3)
    report = _run_monodromy(params, cfg, args.curve)
    out = report.to_json()
    out["scope"] = "curve" if args.curve else "base"
    out["parameters"] = [str(v) for v in params.as_tuple()]
    return (EXIT_OK if report.status == "finite" else EXIT_NEGATIVE), out


def _solve_basis(args):
    basis = solution_basis(args.case)
    B = _q(args.B, "B")
    if B is not None:
        p = basis.params
        basis = solution_basis(args.case, LameParameters(p.ell, B, p.g2, p.g3))
    return basis


def cmd_solve(args, cfg: RunConfig):
    basis = _solve_basis(args)
    if args.grid is not None:
        return _solve_grid(args, basis)
    if args.x0 is None:
        raise UsageError("solve needs --x0 or --grid")
    x0 = parse_complex(args.x0)
    if args.branch == "all":
        evs = [evaluate(basis, x0, k, cfg.root_residual) for k in range(basis.degree)]
        worst = max(max(ev.residuals) for ev in evs)
        out = {"case": basis.label, "x0": [x0.real, x0.imag], "degree": basis.degree,
               "threshold": args.threshold, "maxResidual": worst, "accepted": worst < args.threshold,
               "branches": [ev.to_json() for ev in evs]}
        return (EXIT_OK if out["accepted"] else EXIT_NEGATIVE), out
    ev = evaluate(basis, x0, int(args.branch), cfg.root_residual)
    out = ev.to_json()
    out["degree"] = basis.degree
    out["threshold"] = args.threshold
    out["accepted"] = max(ev.residuals) < args.threshold
    return (EXIT_OK if out["accepted"] else EXIT_NEGATIVE), out


def _solve_grid(args, basis):
    n = args.grid
    if n < 1:
        raise UsageError("--grid must be positive")
    branches = range(basis.degree) if args.branch == "all" else [int(args.branch)]
    rows = []
    box = args.box
    for i in range(n):
        for k in range(n):
            x = complex(-box + 2 * box * (i + 0.5) / n, -box + 2 * box * (k + 0.5) / n)
            for br in branches:
                try:
                    ev = evaluate(basis, x, br)
                    rows.append([x.real, x.imag, br, *ev.residuals, "ok"])
                except (BranchCollisionError, ValueError) as err:
                    rows.append([x.real, x.imag, br, "", "", type(err).__name__])
    return EXIT_OK, {"_csv": rows}


def cmd_schwarz(args, cfg: RunConfig):
    t = _triple_from_text(args.triple)
    hit = full_schwarz_case(t)
    try:
        normalized = str(normalize_triple(t))
    except DegenerateTripleError:
        normalized = None
    out = {"triple": str(t), "normalized": normalized}
    if hit is None:
        out.update(case=None, group=None, degree=None, finite=False)
        return EXIT_NEGATIVE, out
    label, group = hit
    degree = entry_for_group(group).degree if group.kind in ("tetrahedral", "octahedral", "icosahedral") else group.order
    out.update(case=label, group=group.short, degree=degree, finite=True)
    return EXIT_OK, out


def cmd_instances(args, cfg: RunConfig):
    return EXIT_OK, {"instances": [k.to_json() for k in known_instances()]}


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lamealg", description="Algebraic solutions and finite monodromy of Lame operators.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--config", help=f"JSON run configuration (default: ${CONFIG_ENV})")
    p.add_argument("--format", choices=("json", "text"), help="output format")
    p.add_argument("--seed", type=int, help="random seed for sampled checks")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def operator_flags(sp, required=False):
        sp.add_argument("--ell", required=True)
        for name in ("B", "g2", "g3"):
            sp.add_argument(f"--{name}", required=required)

    c = sub.add_parser("classify", help="l-based classification, plus monodromy when B, g2, g3 are given")
    operator_flags(c)
    c.add_argument("--curve", action="store_true", help="Weierstrass form on the elliptic curve")
    c.set_defaults(func=cmd_classify)

    v = sub.add_parser("verify-pullback", help="exact weak-pullback certificate")
    v.add_argument("--named", help="one of: " + ", ".join(sorted(named_maps())))
    v.add_argument("--lame", help="l,B,g2,g3")
    v.add_argument("--triple", help="a,b,c")
    v.add_argument("--xi", help="rational function of x")
    v.set_defaults(func=cmd_verify_pullback)

    m = sub.add_parser("monodromy", help="numerical projective monodromy group")
    operator_flags(m, required=True)
    m.add_argument("--curve", action="store_true", help="report the even subgroup (curve monodromy)")
    m.add_argument("--tol", type=float, help="integration tolerance")
    m.add_argument("--match-tol", type=float, help="closure matching tolerance")
    m.add_argument("--cap", type=int, help="closure size cap")
    m.set_defaults(func=cmd_monodromy)

    s = sub.add_parser("solve", help="evaluate the explicit algebraic solution basis")
    s.add_argument("--case", required=True, choices=CASES)
    s.add_argument("--x0", help="evaluation point, e.g. '3+0i'")
    s.add_argument("--branch", default="0", help="branch index, or 'all'")
    s.add_argument("--B", help="override the accessory parameter (negative control)")
    s.add_argument("--threshold", type=float, default=1e-8, help="relative residual acceptance threshold")
    s.add_argument("--grid", type=int, help="emit a CSV of residuals on an n x n grid")
    s.add_argument("--box", type=float, default=3.0, help="grid half-width")
    s.set_defaults(func=cmd_solve)

    w = sub.add_parser("schwarz", help="look up a hypergeometric exponent triple")
    w.add_argument("--triple", required=True, help="a,b,c")
    w.set_defaults(func=cmd_schwarz)

    i = sub.add_parser("instances", help="the five known algebraic instances")
    i.set_defaults(func=cmd_instances)
    return p


_NEGATIVE_VALUE = re.compile(r"^-[0-9.]")


def _attach_negative_values(argv: Sequence[str]) -> list[str]:
    """Turn ``--opt -1/9`` into ``--opt=-1/9``; argparse reads a leading '-' as an option otherwise."""
    out: list[str] = []
    for tok in argv:
        if out and _NEGATIVE_VALUE.match(tok) and out[-1].startswith("--") and "=" not in out[-1]:
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = build_parser().parse_args(_attach_negative_values(argv))
        cfg = RunConfig.load(args.config)
        if args.format:
            cfg = replace(cfg, output_format=args.format)
        if args.seed is not None:
            cfg = replace(cfg, seed=args.seed)
        if args.command == "solve" and args.branch != "all" and not args.branch.isdigit():
            raise UsageError("--branch must be a nonnegative integer or 'all'")
        code, payload = args.func(args, cfg)
    except UsageError as err:
        print(f"lamealg: error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (DegenerateCurveError, DegenerateTripleError, NonFuchsianError, BranchCollisionError) as err:
        print(f"lamealg: invalid input: {err}", file=sys.stderr)
        return EXIT_INVALID
    except (IllConditionedClosure, IntegrationError) as err:
        print(f"lamealg: numerical failure: {err}", file=sys.stderr)
        return EXIT_NEGATIVE
    except ValueError as err:
        print(f"lamealg: invalid input: {err}", file=sys.stderr)
        return EXIT_INVALID
    if "_csv" in payload:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(["re", "im", "branch", "residual1", "residual2", "status"])
        for row in payload["_csv"]:
            w.writerow([f"{v:.15g}" if isinstance(v, float) else v for v in row])
    else:
        print(render(payload, cfg.output_format))
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
