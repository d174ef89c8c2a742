"""Command-line front end: ``hamosc check | simulate | report | catalog | verify-lemmas``.

Exit codes: 0 success, 1 property violation, 2 input error, 3 numerical
breakdown.  Verdicts are data, so ``check`` exits 0 whatever they say.
"""
import argparse
import json
import math
import os
import sys

import numpy as np

from . import catalog
from . import expr as ex
from .criteria import CriterionConfig, run_all
from .dynamics import ConjoinedInitialData, integrate_hamiltonian, find_det_zeros
from .errors import (
    DomainError, ExprSyntaxError, HamoscError, HermitianViolation, NoConvergence, NotHermitian,
    NotPSD, NumericalBreakdown, SchemaError, StepUnderflow,
)
from .matrix_core import PositiveFunctional
from .problem import load_problem, matrix_from_json
from .properties import SUITES, run_all_suites, write_counterexample

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_BREAKDOWN = 0, 1, 2, 3

_INPUT_ERRORS = (SchemaError, HermitianViolation, NotHermitian, NotPSD, ExprSyntaxError, DomainError)
_BREAKDOWN = (NumericalBreakdown, StepUnderflow, NoConvergence)


class InputError(Exception):
    pass


# ---------------------------------------------------------------- helpers

def _read_json(path, what):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as err:
        raise InputError(f"cannot read {what} {path!r}: {err.strerror}") from None
    except json.JSONDecodeError as err:
        raise InputError(f"{what} {path!r} is not valid JSON: {err}") from None


def resolve_problem(name):
    """A catalog name, a JSON file, or an inline JSON document."""
    if name in catalog.names():
        return catalog.get(name)
    if name in catalog.FAMILIES:
        raise InputError(f"{name!r} is a family; pick one of {', '.join(catalog.FAMILIES[name])}")
    if not (name.lstrip().startswith("{") or os.path.exists(name)):
        raise InputError(f"{name!r} is neither a catalog problem nor a file")
    p = load_problem(name)
    return p if p.label else type(p)(p.A, p.B, p.C, p.t0, os.path.basename(name), p.notes, p.horizon)


def _scalar(text):
    if text is None:
        return None
    try:
        return float(text)
    except ValueError:
        pass
    e = ex.parse_expr(text)
    return e if ex.has_t(e) else ex.eval_expr(e, 0.0)


def _functional(spec, n):
    if spec in (None, "trace"):
        return PositiveFunctional.trace(n)
    if spec == "trace-normalized":
        return PositiveFunctional.normalized_trace(n)
    doc = _read_json(spec, "weight file")
    W = matrix_from_json(doc, n, "weight")
    if not W.is_constant:
        raise InputError("the functional weight must be constant")
    return PositiveFunctional.from_weight(W(0.0))


def build_config(args, p):
    lam = None
    if args.lambda_file:
        lam = matrix_from_json(_read_json(args.lambda_file, "Lambda file"), p.n, "Lambda")
    horizon = args.horizon if args.horizon is not None else (p.horizon or CriterionConfig.horizon)
    return CriterionConfig(
        g=_functional(args.functional, p.n), horizon=horizon, theta=args.theta, window=args.window,
        weight=args.weight, lambda_=lam, alpha=_scalar(args.alpha), beta=_scalar(args.beta),
        gamma=_scalar(args.gamma) if args.gamma is not None else 0.0,
    )


def _init(args, p):
    if not getattr(args, "y0_file", None):
        return None
    return ConjoinedInitialData.from_json(_read_json(args.y0_file, "initial data file"), p.n)


def _clean(obj):
    """Strict JSON: non-finite floats become ``null``."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        return _clean(obj.item())
    return obj


def _dump(doc, path):
    with open(path, "w") as fh:
        json.dump(_clean(doc), fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------- commands

def cmd_check(args, out):
    p = resolve_problem(args.problem)
    cfg = build_config(args, p)
    table = run_all(p, cfg, simulate=not args.no_simulate, init=_init(args, p))
    print(table.to_text(), file=out)
    if args.json:
        _dump(table.to_json(), args.json)
    return EXIT_OK


def cmd_report(args, out):
    p = resolve_problem(args.problem)
    cfg = build_config(args, p)
    table = run_all(p, cfg, simulate=True, init=_init(args, p))
    print(f"problem: {table.problem}", file=out)
    if p.notes:
        print(f"notes: {p.notes}", file=out)
    print(f"n = {p.n}, t0 = {p.t0:g}, horizon = {cfg.horizon:g}", file=out)
    for v in table.verdicts:
        print(f"\n[{v.criterion_id}] {v.status.value}", file=out)
        for h in v.hypotheses:
            mark = "pass" if h.passed else "FAIL"
            where = f" (t={h.witness_t:g})" if h.witness_t is not None else ""
            print(f"  {mark}  {h.name}{where}: {h.evidence}", file=out)
        for tr in v.traces:
            print(f"  trace {tr.name}: value({tr.T:g}) = {tr.value_at_T:.6g} -> {tr.classification.value}",
                  file=out)
        for note in v.notes:
            print(f"  note: {note}", file=out)
    print("", file=out)
    lines = table.to_text().splitlines()
    for line in lines[1 + len(table.verdicts):]:
        print(line.strip(), file=out)
    if args.json:
        _dump(table.to_json(), args.json)
    return EXIT_OK


def cmd_simulate(args, out):
    p = resolve_problem(args.problem)
    horizon = args.horizon if args.horizon is not None else (p.horizon or CriterionConfig.horizon)
    traj = integrate_hamiltonian(p, _init(args, p), p.t0 + horizon)
    zeros = find_det_zeros(traj)
    print(f"problem: {p.label}  horizon [{traj.t0:g}, {traj.T:g}]  steps {traj.stats['accepted']}", file=out)
    if not zeros.zeros:
        print(f"no zeros on [{traj.t0:g},{traj.T:g}]", file=out)
    for z in zeros.zeros:
        print(f"zero t = {z.t:.10f}  bracket [{z.t - z.width:.10f}, {z.t + z.width:.10f}]  ({z.kind})", file=out)
    for z in zeros.unconfirmed:
        print(f"unconfirmed dip t = {z.t:.10f}  |det| = {z.abs_det:.3e}", file=out)
    print(f"max conjoinedness residual {traj.stats['max_conjoined_residual']:.3e}", file=out)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            traj.to_csv(fh)
    if args.json:
        _dump({"problem": p.label, "simulation": zeros.to_json(), "stats": traj.stats}, args.json)
    return EXIT_OK


def cmd_catalog(args, out):
    if args.action == "list":
        for e in catalog.ENTRIES:
            print(f"{e.name:<22} {e.summary}", file=out)
        for fam, members in catalog.FAMILIES.items():
            print(f"{fam:<22} family: {', '.join(members)}", file=out)
        return EXIT_OK
    if not args.name:
        raise InputError("catalog show needs a problem name")
    if args.name not in catalog.names() and args.name not in catalog.FAMILIES:
        raise InputError(f"unknown catalog problem {args.name!r}")
    print(catalog.describe(args.name), file=out)
    return EXIT_OK


def cmd_verify_lemmas(args, out):
    names = args.suite or list(SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise InputError(f"unknown suite(s) {unknown}; known: {', '.join(SUITES)}")
    if args.cases < 1:
        raise InputError("--cases must be positive")
    results = run_all_suites(args.seed, args.cases, names)
    status = EXIT_OK
    for r in results:
        verdict = "pass" if r.passed else "FAIL"
        print(f"{verdict}  {r.name:<18} {r.cases} cases  worst margin {r.worst_margin:.3e}  {r.statement}",
              file=out)
        if not r.passed:
            status = EXIT_VIOLATION
            path = os.path.join(args.out, f"counterexample-{r.name}.json")
            write_counterexample(r, path)
            print(f"      {r.failures} failure(s); first counterexample written to {path}", file=out)
    return status


# ---------------------------------------------------------------- parser

def _criteria_flags(sp):
    sp.add_argument("problem", help="catalog name, JSON problem file, or inline JSON")
    sp.add_argument("--horizon", type=float, help="T - t0 (default 200)")
    sp.add_argument("--theta", type=float, help="divergence threshold (default 10 (1 + |value(t0)|))")
    sp.add_argument("--window", type=int, default=8, help="trailing monotone window")
    sp.add_argument("--functional", help="trace | trace-normalized | path to a weight matrix JSON")
    sp.add_argument("--weight", choices=("lambda1", "nu0"), default="lambda1",
                    help="quadratic coefficient of the scalar reductions")
    sp.add_argument("--lambda-file", help="JSON matrix for Lambda(t)")
    sp.add_argument("--alpha", help="alpha(t) for the Sep criterion (number or expression)")
    sp.add_argument("--beta", help="beta(t); defaults to 1 - alpha")
    sp.add_argument("--gamma", help="gamma(t), default 0")
    sp.add_argument("--y0-file", help="JSON with Phi0 and Y0 for the simulation")
    sp.add_argument("--json", help="write the verdict table as JSON")


def build_parser():
    parser = argparse.ArgumentParser(prog="hamosc", description="Oscillation of linear Hamiltonian systems.")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("check", help="run every criterion plus a simulation")
    _criteria_flags(sp)
    sp.add_argument("--no-simulate", action="store_true", help="skip the simulation cross-check")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("report", help="long-form report with every hypothesis and trace")
    _criteria_flags(sp)
    sp.set_defaults(func=cmd_report)

    sp = sub.add_parser("simulate", help="integrate the system and list det Phi zeros")
    sp.add_argument("problem")
    sp.add_argument("--horizon", type=float)
    sp.add_argument("--y0-file", help="JSON with Phi0 and Y0 (Y0 Hermitian)")
    sp.add_argument("--csv", help="write the trajectory as CSV")
    sp.add_argument("--json", help="write zeros and integration stats as JSON")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("catalog", help="list or show built-in problems")
    sp.add_argument("action", choices=("list", "show"))
    sp.add_argument("name", nargs="?")
    sp.set_defaults(func=cmd_catalog)

    sp = sub.add_parser("verify-lemmas", help="run the seeded matrix property suites")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--cases", type=int, default=200)
    sp.add_argument("--suite", action="append", help="restrict to a suite (repeatable)")
    sp.add_argument("--out", default=".", help="directory for counterexample files")
    sp.set_defaults(func=cmd_verify_lemmas)
    return parser


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except _BREAKDOWN as err:
        print(f"error: numerical breakdown: {err}", file=sys.stderr)
        return EXIT_BREAKDOWN
    except (InputError, *_INPUT_ERRORS) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except HamoscError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_BREAKDOWN


if __name__ == "__main__":
    sys.exit(main())
