"""Command line interface.

    posicert certify   <problem-file> [--n-max K] [--tol T] [--denom-bound B]
                       [--force] [--threads J] [--out cert-file] [--seed S] [--samples N]
    posicert check-sos <problem-file> [...]
    posicert odd-power <problem-file> [--m-max K] [...]
    posicert epsilon   <problem-file> [...]
    posicert verify    <cert-file>
    posicert dump-sdp  <problem-file> --n N [--out file]

Exit codes: 0 certified/valid, 1 not found up to the bound (or certificate
invalid), 2 counterexample found, 3 input error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from . import driver, sdp
from .driver import (
    DEFAULT_DENOMINATOR_BOUNDS,
    NumericalFailureError,
    SearchOptions,
    positivity_precheck,
)
from .exact import format_certificate, parse_certificate, verify_certificate
from .gram import GramSystem, build_gram_system
from .parsing import ParseError, parse_problem

EXIT_OK = 0
EXIT_NOT_FOUND = 1
EXIT_COUNTEREXAMPLE = 2
EXIT_INPUT_ERROR = 3
EXIT_NUMERICAL_FAILURE = 4


def _add_search_arguments(sub, with_m_max=False):
    sub.add_argument("problem", help="problem file")
    sub.add_argument("--n-max", type=int, default=None, help="largest multiplier power to scan")
    if with_m_max:
        sub.add_argument("--m-max", type=int, default=None, help="largest odd power to scan")
    sub.add_argument("--tol", type=float, default=1e-8, help="SDP relative gap tolerance")
    sub.add_argument(
        "--denom-bound",
        type=int,
        default=None,
        help="largest denominator bound of the rounding ladder",
    )
    sub.add_argument("--force", action="store_true", help="search even when the precheck objects")
    sub.add_argument("--threads", type=int, default=1, help="evaluate exponents concurrently")
    sub.add_argument("--out", default=None, help="write the certificate to this file")
    sub.add_argument("--seed", type=int, default=0, help="precheck sampling seed")
    sub.add_argument("--samples", type=int, default=1000, help="precheck sample count")


def _make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="posicert", description=__doc__.splitlines()[0])
    subs = parser.add_subparsers(dest="command", required=True)
    for name in ("certify", "check-sos", "odd-power", "epsilon"):
        sub = subs.add_parser(name)
        _add_search_arguments(sub, with_m_max=(name == "odd-power"))
    verify = subs.add_parser("verify")
    verify.add_argument("certificate", help="certificate file (exact arithmetic check only)")
    dump = subs.add_parser("dump-sdp")
    dump.add_argument("problem", help="problem file")
    dump.add_argument("--n", type=int, required=True, help="multiplier power")
    dump.add_argument("--out", default=None, help="write the dump to this file")
    return parser


def _bounds_from_flag(limit):
    if limit is None:
        return DEFAULT_DENOMINATOR_BOUNDS
    if limit < 1:
        raise ParseError("--denom-bound must be positive")
    ladder = tuple(b for b in DEFAULT_DENOMINATOR_BOUNDS if b < limit) + (limit,)
    return ladder


def _format_point(point, variables):
    return ", ".join(f"{name} = {value}" for name, value in zip(variables, point))


def _run_search(args, command: str) -> int:
    try:
        with open(args.problem, encoding="utf-8") as fh:
            spec = parse_problem(fh.read())
        if args.n_max is not None:
            if args.n_max < 0:
                raise ParseError("--n-max must be nonnegative")
            spec = replace(spec, n_max=args.n_max)
        if command == "odd-power" and args.m_max is not None:
            if args.m_max < 1 or args.m_max % 2 == 0:
                raise ParseError("--m-max must be an odd positive integer")
            spec = replace(spec, m_max=args.m_max)
        mode = {"certify": "certify", "check-sos": "check-sos"}.get(command)
        if mode is not None and spec.mode != mode:
            spec = replace(spec, mode=mode)
        options = SearchOptions(
            gap_tolerance=args.tol,
            denominator_bounds=_bounds_from_flag(args.denom_bound),
            threads=max(1, args.threads),
        )
    except (OSError, ParseError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    if not args.force:
        check = positivity_precheck(spec, samples=args.samples, seed=args.seed)
        for warning in check.warnings:
            print(f"warning: {warning}")
        if check.negative is not None:
            point, which, value = check.negative
            print(
                f"counterexample: {which} = {value} < 0 at {_format_point(point, spec.variables)}"
            )
            print("search skipped; pass --force to search anyway")
            return EXIT_COUNTEREXAMPLE
        if check.zero is not None:
            point, which = check.zero
            print(f"counterexample to strictness: {which} vanishes at {_format_point(point, spec.variables)}")
            print(
                "nonnegative inputs may still admit certificates; pass --force to search anyway"
            )
            return EXIT_COUNTEREXAMPLE

    try:
        if command in ("certify", "check-sos"):
            report = driver.certify(spec, options)
            exponent_name = "n"
        elif command == "odd-power":
            report = driver.odd_power(spec, options)
            exponent_name = "m"
        else:
            report = driver.epsilon_margin(spec, options)
            exponent_name = "n"
    except NumericalFailureError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL_FAILURE
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    print(driver.render_report(report, exponent_name))
    if report.certificate is not None and args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(format_certificate(report.certificate))
        print(f"certificate written to {args.out}")
    if report.outcome == driver.OUTCOME_CERTIFICATE:
        return EXIT_OK
    if report.outcome == driver.OUTCOME_REJECTED:
        return EXIT_INPUT_ERROR
    return EXIT_NOT_FOUND


def _run_verify(args) -> int:
    try:
        with open(args.certificate, encoding="utf-8") as fh:
            cert = parse_certificate(fh.read())
    except (OSError, ParseError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    result = verify_certificate(cert)
    if result.valid:
        print("Valid")
        return EXIT_OK
    print(f"Invalid: {result.reason}")
    return EXIT_NOT_FOUND


def _run_dump(args) -> int:
    try:
        with open(args.problem, encoding="utf-8") as fh:
            spec = parse_problem(fh.read())
        if args.n < 0:
            raise ParseError("--n must be nonnegative")
    except (OSError, ParseError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    system = build_gram_system(spec.f, spec.g, args.n, spec.constraints, spec.grading)
    if not isinstance(system, GramSystem):
        print(f"no system at n = {args.n}: {system.reason}")
        return EXIT_NOT_FOUND
    dump = sdp.format_debug_dump(driver.system_to_sdp(system))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(dump)
    else:
        sys.stdout.write(dump)
    return EXIT_OK


def main(argv=None) -> int:
    args = _make_parser().parse_args(argv)
    if args.command == "verify":
        return _run_verify(args)
    if args.command == "dump-sdp":
        return _run_dump(args)
    return _run_search(args, args.command)


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
