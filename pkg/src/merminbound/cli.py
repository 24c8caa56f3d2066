"""Command-line front end: ``merminbound {analyze,sweep,reproduce,oracle}``.

States are given either as ``--state family:key=value,key=value`` or as a
JSON file ``{"n": 3, "re": [[...]], "im": [[...]]}`` via ``--file``.

Exit codes: 0 ok, 2 bad arguments or invalid state, 3 unreadable input
file, 4 internal consistency failure (oracle exceeded the analytic bound).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys

import numpy as np

from .analysis import analyze, concurrence_or_none
from .bounds import CERTIFY_TOL, ConsistencyError, analytic_bound, default_family
from .optimizer import OptimizerConfig, seesaw_maximize
from .qstate import FAMILIES, InvalidStateError, ParameterError, load_density_matrix, make_family
from .reproduce import TARGETS, reproduce

DEFAULT_SEED = 0
SEED_ENV = "MERMIN_SEED"

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_CONSISTENCY = 0, 2, 3, 4

STATE_HELP = (
    "state as family:key=value,... with family one of "
    + ", ".join(f.replace("_", "-") for f in FAMILIES)
    + " (e.g. ghz-symmetric:l=0.3,theta=0.4, noisy-w:p=1, mixed:n=3)"
)


class InputFileError(Exception):
    """The state file could not be read or decoded."""


def _number(text: str, key: str):
    try:
        return int(text) if key == "n" else float(text)
    except ValueError:
        raise ParameterError(f"parameter {key!r} needs a number, got {text!r}") from None


def parse_params(text: str) -> dict:
    params = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ParameterError(f"expected key=value, got {item!r}")
        key = key.strip()
        params[key] = _number(value.strip(), key)
    return params


def parse_state(spec: str):
    """``'noisy-ghz:p=0.6'`` -> ``('noisy_ghz', {'p': 0.6})``."""
    name, _, rest = spec.partition(":")
    return name.strip().lower().replace("-", "_"), parse_params(rest)


def _load_state(args):
    if args.file is not None:
        try:
            rho = load_density_matrix(args.file)
        except (OSError, json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise InputFileError(f"cannot read {args.file}: {exc}") from exc
        except (KeyError, TypeError) as exc:
            raise InputFileError(f"malformed state file {args.file}: missing or bad field {exc}") from exc
        return rho, {"file": str(args.file)}
    family, params = parse_state(args.state)
    rho = make_family(family, **params)
    return rho, {"family": family, "params": params}


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise ParameterError(f"{SEED_ENV} must be an integer, got {env!r}") from None
    return DEFAULT_SEED


def _config(args) -> OptimizerConfig:
    return OptimizerConfig(restarts=args.restarts, seed=_seed(args))


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        return "%.17g" % x
    return str(x)


def _dump(doc) -> str:
    return json.dumps(doc, indent=2)


def cmd_analyze(args, out) -> int:
    rho, state = _load_state(args)
    report = analyze(rho, state, oracle=args.oracle, cfg=_config(args), split=args.split, tol=args.tol)
    if args.format == "json":
        out.write(_dump(report.to_dict()) + "\n")
        return EXIT_OK
    br = report.bound_report
    row = {
        "state": args.file if args.file is not None else args.state,
        "n": report.n,
        "lambdaMax": br.lambda_max,
        "bound": br.bound,
        "degeneracy": br.degeneracy,
        "tightness": br.tightness.value,
        "oracleValue": br.oracle_value,
        "cm": report.concurrence,
        "violatesClassical": br.violates_classical,
    }
    w = csv.writer(out, lineterminator="\n")
    w.writerow(row)
    w.writerow([_fmt(v) for v in row.values()])
    return EXIT_OK


SWEEP_COLUMNS = ("param", "lambdaMax", "bound", "cm", "oracleValue", "violatesClassical")


def cmd_sweep(args, out) -> int:
    family = args.family.strip().lower().replace("-", "_")
    if family not in FAMILIES:
        raise ParameterError(f"unknown state family {args.family!r}; choose from {sorted(FAMILIES)}")
    names = FAMILIES[family][1]
    param = "ell" if args.param == "l" else args.param
    if param not in names:
        raise ParameterError(f"family {family!r} has no parameter {args.param!r}; it takes {names}")
    if args.points < 1:
        raise ParameterError("--points must be >= 1")
    fixed = parse_params(args.fixed or "")
    cfg = _config(args)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    grid = [args.start] if args.points == 1 else np.linspace(args.start, args.stop, args.points)
    for x in grid:
        rho = make_family(family, **{**fixed, param: float(x)})
        report = analytic_bound(rho)
        oracle = None
        if args.oracle:
            opt = seesaw_maximize(rho, default_family(rho.n), cfg)
            if opt.best_value > report.bound + CERTIFY_TOL:
                raise ConsistencyError(
                    f"oracle value {opt.best_value:.15g} exceeds analytic bound {report.bound:.15g} at {param}={x}"
                )
            oracle = opt.best_value
        violates = (oracle if oracle is not None else report.bound) > report.classical_bound + 1e-9
        w.writerow([_fmt(float(x)), _fmt(report.lambda_max), _fmt(report.bound),
                    _fmt(concurrence_or_none(rho)), _fmt(oracle), _fmt(violates)])
    return EXIT_OK


def cmd_reproduce(args, out) -> int:
    text, data = reproduce(args.target, seed=_seed(args))
    if args.format == "json":
        out.write(_dump(data) + "\n")
    else:
        out.write(text + "\n")
    return EXIT_OK


def cmd_oracle(args, out) -> int:
    rho, state = _load_state(args)
    family = args.operator or default_family(rho.n)
    opt = seesaw_maximize(rho, family, _config(args))
    doc = {"state": state, "n": rho.n, "operator": family, **opt.to_dict()}
    out.write(_dump(doc) + "\n")
    return EXIT_OK


def _add_state_args(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--state", help=STATE_HELP)
    src.add_argument("--file", help='JSON density matrix {"n", "re", "im"}')


def _add_oracle_args(p):
    p.add_argument("--restarts", type=int, default=32, help="see-saw restarts (default 32)")
    p.add_argument("--seed", type=int, default=None, help=f"oracle seed (default ${SEED_ENV} or {DEFAULT_SEED})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="merminbound",
        description="Analytical upper bound 2*sqrt(2)*lambda_max on Mermin/MABK expectation values.",
        epilog="Parameter grammar: family:key=value,key=value (l is accepted for ell).",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log optimizer progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="bound, optional oracle, concurrence and relations for one state")
    _add_state_args(p)
    p.add_argument("--oracle", action="store_true", help="run the see-saw oracle and certify tightness")
    _add_oracle_args(p)
    p.add_argument("--split", type=int, default=None, help="parties on the row side of the reshape (default n//2)")
    p.add_argument("--tol", type=float, default=CERTIFY_TOL, help=f"certification tolerance (default {CERTIFY_TOL:g})")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sweep", help="CSV of the bound along one family parameter")
    p.add_argument("--family", required=True)
    p.add_argument("--param", required=True)
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--points", type=int, required=True)
    p.add_argument("--fixed", default=None, help="other parameters as key=value,... (e.g. theta=0.4)")
    p.add_argument("--oracle", action="store_true")
    _add_oracle_args(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("reproduce", help="print a worked-example table")
    p.add_argument("target", choices=TARGETS)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("oracle", help="bare see-saw maximization of |<B>|")
    _add_state_args(p)
    p.add_argument("--operator", choices=("mermin", "mabk"), default=None,
                   help="Bell operator (default mermin for n=3, mabk otherwise)")
    _add_oracle_args(p)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args, out)
    except InputFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ConsistencyError as exc:
        print(f"consistency failure: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY
    except (ParameterError, InvalidStateError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
