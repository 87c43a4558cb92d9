"""
Main entry point for the extended Lorentz cone toolkit.
Subcommands: solve (Picard iteration), verify (property suites and point
checks) and reproduce (the worked example table).
"""

import argparse
import sys
from enum import IntEnum
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence

from src.builtin_problems import builtin_ids, get_builtin
from src.cone_core import leq_order
from src.config import config
from src.errors import LorentzError, ProblemFileError
from src.formatter import ReportFormatter, to_json
from src.logging_config import setup_logging
from src.models import Point, Problem, SolveOptions
from src.problem_io import parse_problem
from src.property_suites import SUITES, check_points, run_suite
from src.reproduction import reproduce
from src.solver import PicardSolver, check_hypotheses


class ExitCode(IntEnum):
    SUCCESS = 0
    INTERNAL_ERROR = 1
    USAGE_ERROR = 2
    INVALID_PROBLEM = 3
    NOT_CONVERGED = 4
    MONOTONICITY_VIOLATION = 5
    PROPERTY_FAILED = 6
    REPRODUCTION_MISMATCH = 7


class UsageError(Exception):
    """Bad command-line input that argparse cannot catch"""


def parse_vector(text: str) -> List[float]:
    """'31,31,3,4' or '8/15,8/15,0,4/15'"""
    try:
        return [float(Fraction(part.strip())) for part in text.split(",") if part.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot parse vector '{text}': {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=Path, default=None,
                        help='JSON configuration file (default: config/config.json if present)')
    common.add_argument('--log-level', default=None,
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'],
                        help='Logging level (default: from configuration, WARNING)')
    common.add_argument('--log-file', nargs='?', const='', default=None,
                        help='Also log to a rotating file (default path from configuration)')
    common.add_argument('--json', action='store_true',
                        help='Print the machine-readable report instead of the summary')
    common.add_argument('--seed', type=int, default=None,
                        help='Random seed (default: from configuration, 42)')

    problem_source = argparse.ArgumentParser(add_help=False)
    problem_source.add_argument('problem', nargs='?', default=None,
                                help='Problem file (JSON)')
    problem_source.add_argument('--builtin', choices=builtin_ids(), default=None,
                                help='Use a builtin problem instead of a file')

    parser = argparse.ArgumentParser(description='Extended Lorentz cone complementarity toolkit')
    commands = parser.add_subparsers(dest='command', required=True)

    solve = commands.add_parser('solve', parents=[common, problem_source],
                                help='Run the Picard iteration on a problem')
    solve.add_argument('--start', default=None, help='Start point, comma separated (default: origin). '
                            'Write a leading minus as --start=-1,2,0,1')
    solve.add_argument('--trace', type=Path, default=None, help='Write the iterate trace as CSV')
    solve.add_argument('--max-iter', type=int, default=None)
    solve.add_argument('--tol-step', type=float, default=None)
    solve.add_argument('--tol-residual', type=float, default=None)
    solve.add_argument('--exact-digits', type=int, default=None,
                       help='Iterate in Decimal arithmetic with this many digits')
    solve.add_argument('--no-monotone-check', action='store_true')

    verify = commands.add_parser('verify', parents=[common, problem_source],
                                 help='Run property suites or check points of a problem')
    verify.add_argument('--suite', choices=SUITES, default=None)
    verify.add_argument('--p', type=int, default=None)
    verify.add_argument('--q', type=int, default=None)
    verify.add_argument('--samples', type=int, default=None)
    verify.add_argument('--point', action='append', default=[],
                        help='Point to test for Omega and Gamma membership (repeatable). '
                             'Write a leading minus as --point=-1,2,0,1')

    commands.add_parser('reproduce', parents=[common], help='Reproduce the worked example')
    return parser


def load_problem(args) -> Optional[Problem]:
    if args.builtin and args.problem:
        raise UsageError("give either a problem file or --builtin, not both")
    if args.builtin:
        return get_builtin(args.builtin)
    if args.problem:
        return parse_problem(args.problem)
    return None


def solve_options(args, problem: Problem) -> SolveOptions:
    base = problem.options or SolveOptions()
    return SolveOptions(
        max_iter=args.max_iter if args.max_iter is not None else base.max_iter,
        tol_step=args.tol_step if args.tol_step is not None else base.tol_step,
        tol_residual=args.tol_residual if args.tol_residual is not None else base.tol_residual,
        monotone_check=base.monotone_check and not args.no_monotone_check,
        trace=args.trace is not None or base.trace,
        exact_digits=args.exact_digits if args.exact_digits is not None else base.exact_digits,
        order_eps=base.order_eps,
    )


def cmd_solve(args) -> ExitCode:
    problem = load_problem(args)
    if problem is None:
        raise UsageError("solve needs a problem file or --builtin")
    try:
        options = solve_options(args, problem)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    start = parse_vector(args.start) if args.start else None
    if start is not None and len(start) != problem.dim:
        raise UsageError(f"--start has {len(start)} components, problem has p+q={problem.dim}")

    report = PicardSolver(problem, options).solve(start)
    if args.trace is not None:
        ReportFormatter.write_trace(report, args.trace)

    below_start = None
    if start is not None:
        below_start = leq_order(Point.from_vector(report.solution, problem.p, problem.q),
                                Point.from_vector(start, problem.p, problem.q))

    if args.json:
        data = ReportFormatter.solve_report_to_dict(report, seed=args.seed)
        if below_start is not None:
            data["limit_below_start"] = below_start
        print(to_json(data))
    else:
        print(ReportFormatter.format_solve_report(report, start))
        if below_start is not None:
            print(f"   {'✅' if below_start else '❌'} Limit is L-below the start point")

    if report.converged:
        return ExitCode.SUCCESS
    if report.termination == report.MONOTONICITY_VIOLATION:
        return ExitCode.MONOTONICITY_VIOLATION
    return ExitCode.NOT_CONVERGED


def cmd_verify(args) -> ExitCode:
    problem = load_problem(args)
    seed = args.seed if args.seed is not None else config.sampling.SEED
    points = [parse_vector(text) for text in args.point]

    if args.suite:
        p = args.p or (problem.p if problem else 2)
        q = args.q or (problem.q if problem else 2)
        if p < 1 or q < 1:
            raise UsageError(f"--p and --q must be positive, got {p}, {q}")
        results = run_suite(args.suite, p, q, args.samples, seed)
        title = f"{args.suite.upper()} SUITE (p={p}, q={q})"
        context = {"suite": args.suite, "p": p, "q": q}
    elif problem is not None:
        for point in points:
            if len(point) != problem.dim:
                raise UsageError(f"--point has {len(point)} components, problem has p+q={problem.dim}")
        results = check_points(problem, points)
        results += check_hypotheses(problem, args.samples, seed)
        title = f"VERIFY {problem.name}"
        context = {"problem": problem.name}
    else:
        raise UsageError("verify needs --suite, a problem file or --builtin")

    if args.json:
        print(to_json(ReportFormatter.property_results_to_dict(results, seed, **context)))
    else:
        print(ReportFormatter.format_property_results(results, title))
        print(f"   Seed: {seed}")
    return ExitCode.SUCCESS if all(r.passed for r in results) else ExitCode.PROPERTY_FAILED


def cmd_reproduce(args) -> ExitCode:
    report = reproduce(args.seed)
    if args.json:
        print(to_json(ReportFormatter.reproduction_to_dict(report)))
    else:
        print(ReportFormatter.format_reproduction(report))
    return ExitCode.SUCCESS if report.passed else ExitCode.REPRODUCTION_MISMATCH


COMMANDS = {"solve": cmd_solve, "verify": cmd_verify, "reproduce": cmd_reproduce}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main application entry point"""
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        if args.config is not None:
            if not config.load_file(args.config):
                raise UsageError(f"configuration file not found: {args.config}")
        else:
            config.load_file()
        setup_logging(level=args.log_level, log_file=args.log_file or None, file_logging=args.log_file is not None)
    except (ProblemFileError, UsageError, ValueError) as e:
        print(f"❌ Configuration error: {e}", file=sys.stderr)
        return ExitCode.USAGE_ERROR

    try:
        return COMMANDS[args.command](args)
    except UsageError as e:
        print(f"❌ {e}", file=sys.stderr)
        return ExitCode.USAGE_ERROR
    except (LorentzError, ValueError) as e:
        print(f"❌ Invalid problem: {e}", file=sys.stderr)
        return ExitCode.INVALID_PROBLEM
    except KeyboardInterrupt:
        print("\n❌ Operation cancelled by user", file=sys.stderr)
        return ExitCode.INTERNAL_ERROR
    except Exception as e:
        print(f"\n❌ Error: {e}", file=sys.stderr)
        return ExitCode.INTERNAL_ERROR


if __name__ == "__main__":
    sys.exit(main())
