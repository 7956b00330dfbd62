"""Command line interface: ``borel-rigidity {eval-borel,invariant,trivialize,selftest}``.

Exit codes: 0 success, 1 invalid input, 2 refused computation, 3 numerical failure.
"""

import argparse
import json
import sys
from pathlib import Path

from .borel import borel_bound, borel_value, is_maximal
from .dilog import NU3
from .documents import encode_matrix, load_document, load_flags
from .errors import NumericalFailure, RefusalError, ValidationError
from .invariant import empirical_borel_ratio, parabolic_bound
from .projflag import DegenerateConfigurationError
from .rigidity import trivialize

EXIT_OK, EXIT_INVALID, EXIT_REFUSED, EXIT_NUMERICAL = 0, 1, 2, 3


def fmt(x):
    return f"{x:.12g}"


class _Printer:
    def __init__(self, quiet):
        self.quiet = quiet

    def __call__(self, *lines):
        if not self.quiet:
            for line in lines:
                print(line)

    def err(self, line):
        if not self.quiet:
            print(line, file=sys.stderr)


def _write_json(path, payload):
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def cmd_eval_borel(args, out):
    if args.input is None:
        raise ValidationError("--input: a flags document is required")
    flags = load_flags(args.input, args.n)
    n = flags[0].n
    value = borel_value(flags)
    bound = borel_bound(n)
    verdict = is_maximal(flags, args.tol, value)
    label = {1: "MAXIMAL(+)", -1: "MAXIMAL(-)", 0: "not maximal"}[verdict]
    out(f"n            {n}",
        f"B_n          {fmt(value)}",
        f"B_n / nu3    {fmt(value / NU3)}",
        f"bound        {fmt(bound)}",
        f"bound / nu3  {fmt(bound / NU3)}",
        f"verdict      {label}")
    if args.output:
        _write_json(args.output, {"n": n, "value": value, "bound": bound, "ratio_nu3": value / NU3,
                                  "maximal": verdict})
    return EXIT_OK


def _experiment(args):
    if args.input is None:
        raise ValidationError("--input: an experiment document is required")
    return load_document(args.input, args.n)


def cmd_invariant(args, out):
    exp = _experiment(args)
    samples = args.samples or exp.samples
    seed = exp.seed if args.seed is None else args.seed
    tol = args.tol or exp.tol
    workers = args.workers or exp.workers
    rep = empirical_borel_ratio(exp.cocycle, exp.boundary, samples, seed, workers,
                                volume=exp.volume, tol=tol)
    rows = [f"n                  {rep.n}",
            f"samples            {rep.samples} (seed {rep.seed}, workers {rep.workers})",
            f"equivariance       {rep.equivariance_residual:.3e}",
            f"lambda             {fmt(rep.ratio)}   ({rep.label})",
            f"stderr             {rep.stderr:.3e}",
            f"integrand range    [{fmt(rep.integrand_min)}, {fmt(rep.integrand_max)}]",
            f"bound C(n+1,3)     {rep.bound}"]
    if exp.partition is not None:
        rows.append(f"parabolic bound    {parabolic_bound(exp.partition)} for partition {exp.partition}")
    if rep.volume is not None:
        rows += [f"Vol(M)             {fmt(rep.volume)}   ({fmt(rep.volume / NU3)} nu3)",
                 f"beta               {fmt(rep.invariant)}   ({fmt(rep.invariant / NU3)} nu3)"]
    rows.append(f"maximal            {rep.maximal:+d}")
    out(*rows)
    if args.output:
        _write_json(args.output, rep.to_dict())
    return EXIT_OK


def cmd_trivialize(args, out):
    exp = _experiment(args)
    seed = exp.seed if args.seed is None else args.seed
    tol = args.tol or 1e-6
    kwargs = {}
    if args.samples:
        kwargs["certificate_samples"] = args.samples
    res = trivialize(exp.cocycle, exp.boundary, tol=tol, seed=seed,
                     workers=args.workers or exp.workers, **kwargs)
    out(f"branch             {res.branch}",
        f"residual           {res.residual:.3e}",
        f"slices             {len(res.f)}",
        f"max slice fit      {max(res.slice_residuals):.3e}")
    for name, devs in res.verification.items():
        out(f"  generator {name}      max deviation {max(devs):.3e}")
    if args.output:
        _write_json(args.output, {"n": exp.n, "branch": res.branch, "residual": res.residual,
                                  "f": [encode_matrix(m) for m in res.f.matrices]})
        out(f"wrote f table to {args.output}")
    return EXIT_OK


def cmd_selftest(args, out):
    from .checks import run_selftest

    results = run_selftest(n_max=args.n or 4, trials=args.samples or 100,
                           seed=args.seed or 0)
    out(f"{'check':6} {'status':6} {'worst':>10} {'tol':>7}  name")
    for r in results:
        out(f"{r.tag:6} {'PASS' if r.passed else 'FAIL':6} {r.worst:10.3e} {r.tol:7.0e}  {r.name}")
    if args.output:
        _write_json(args.output, [{"tag": r.tag, "name": r.name, "passed": r.passed,
                                   "worst": r.worst, "tol": r.tol, "detail": r.detail}
                                  for r in results])
    return EXIT_OK if all(r.passed for r in results) else EXIT_NUMERICAL


COMMANDS = {
    "eval-borel": (cmd_eval_borel, "evaluate B_n on four flags"),
    "invariant": (cmd_invariant, "estimate the Borel invariant of a document"),
    "trivialize": (cmd_trivialize, "certify maximality and recover the twist"),
    "selftest": (cmd_selftest, "run the numerical self-checks"),
}


def build_parser():
    parser = argparse.ArgumentParser(prog="borel-rigidity", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--n", type=int, help="dimension (overrides the document)")
        p.add_argument("--input", help="JSON document or bundled example name")
        p.add_argument("--samples", type=int, help="sample count (trials for selftest)")
        p.add_argument("--seed", type=int, help="random seed")
        p.add_argument("--tol", type=float, help="tolerance")
        p.add_argument("--workers", type=int, help="worker threads (default 1)")
        p.add_argument("--output", help="write a JSON report here")
    return parser


def main(argv=None, quiet=False):
    out = _Printer(quiet)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    if args.tol is None and args.command == "eval-borel":
        args.tol = 1e-6
    for flag in ("n", "samples", "workers"):
        value = getattr(args, flag)
        if value is not None and value < 1:
            out.err(f"error: --{flag} must be positive")
            return EXIT_INVALID
    if args.tol is not None and not args.tol > 0:
        out.err("error: --tol must be positive")
        return EXIT_INVALID
    handler = COMMANDS[args.command][0]
    try:
        return handler(args, out)
    except (ValidationError, DegenerateConfigurationError) as exc:
        out.err(f"error: {exc}")
        return EXIT_INVALID
    except RefusalError as exc:
        out.err(f"refused: {exc}")
        return EXIT_REFUSED
    except NumericalFailure as exc:
        out.err(f"numerical failure: {exc}")
        return EXIT_NUMERICAL


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
