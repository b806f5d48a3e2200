"""Command-line front end: recover, ric, demo, sweep.

Exit codes are the machine contract: 0 success, 1 malformed input or
usage, 2 numerical failure (rank loss, failed self-check), 3 enumeration
budget exceeded. All indices printed or read are 0-based.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import fileio
from .constructions import build_necessary, build_sharp
from .errors import (
    BudgetExceededError,
    EigenFailureError,
    InvalidCountsError,
    OmpPriorError,
    RankDeficientError,
    SelfCheckFailedError,
    ThresholdViolatedError,
)
from .greedy import (
    AdversarialOutside,
    FixedIterations,
    HighestIndex,
    LowestIndex,
    ResidualThreshold,
    omp_prior,
    success_check,
)
from .harness import run_sweep
from .linalg import projection_residual
from .ric import exact_ric
from .signals import PriorSupport

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_BUDGET = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage; the contract here is 1
    def error(self, message):
        raise _UsageError(message)


def _fmt(x: float) -> str:
    return fileio.format_value(x)


def _tie_policy(name: str, problem: fileio.Problem):
    if name == "lowest":
        return LowestIndex()
    if name == "highest":
        return HighestIndex()
    if problem.truth is None:
        raise _UsageError("--tie adversarial needs the true signal x in the problem file")
    support = tuple(int(i) for i in np.flatnonzero(problem.truth))
    return AdversarialOutside(support, problem.prior_indices)


def _stop_rule(args, problem: fileio.Problem):
    if args.stop is not None:
        kind, raw = args.stop
        if kind == "iters":
            try:
                return FixedIterations(int(raw))
            except ValueError:
                raise _UsageError(f"--stop iters needs an integer, got {raw!r}")
        if kind == "residual":
            try:
                return ResidualThreshold(float(raw))
            except ValueError:
                raise _UsageError(f"--stop residual needs a number, got {raw!r}")
        raise _UsageError(f"--stop kind must be 'iters' or 'residual', got {kind!r}")
    # default: residual rule at the file's noise level, else the remaining
    # iteration count (k minus the known-true prior overlap)
    if problem.epsilon > 0:
        return ResidualThreshold(problem.epsilon)
    if problem.truth is not None:
        support = set(int(i) for i in np.flatnonzero(problem.truth))
        g = sum(1 for i in problem.prior_indices if i in support)
    else:
        g = len(problem.prior_indices)
    return FixedIterations(max(problem.k - g, 0))


def cmd_recover(args) -> int:
    problem = fileio.read_problem(args.problem)
    stop = _stop_rule(args, problem)
    tie = _tie_policy(args.tie, problem)
    trace = omp_prior(problem.matrix, problem.y, PriorSupport(problem.prior_indices), stop, tie)
    print(f"prior: {' '.join(map(str, trace.prior_indices)) or '(empty)'}")
    print("t j_t residual_norm")
    print(f"0 - {_fmt(trace.residual_norms[0])}")
    for t, (j, r) in enumerate(zip(trace.selected_indices, trace.residual_norms[1:]), start=1):
        tie_mark = " tie" if trace.tie_encountered[t - 1] else ""
        print(f"{t} {j} {_fmt(r)}{tie_mark}")
    print(f"iterations: {trace.iterations_run}")
    print("estimate: " + " ".join(_fmt(v) for v in trace.final_estimate))
    return EXIT_OK


def cmd_ric(args) -> int:
    A = fileio.read_matrix(args.matrix)
    report = exact_ric(A, args.order)
    print(f"order: {report.order}")
    print(f"delta: {_fmt(report.value)}")
    print(f"rip_holds: {report.rip_holds}")
    print(f"witness: {' '.join(map(str, report.witness_subset))}")
    print(f"subsets_evaluated: {report.subsets_evaluated}")
    return EXIT_OK


def _print_correlation_table(A, y, prior, truth_support):
    r0 = projection_residual(A[:, list(prior.indices)], y)
    corr = A.T @ r0
    candidates = [i for i in range(A.shape[1]) if i not in set(prior.indices)]
    print("first-iteration correlations (index, |corr|, in_true_support):")
    for i in candidates:
        print(f"  {i} {_fmt(abs(corr[i]))} {i in set(truth_support)}")


def cmd_demo(args) -> int:
    if args.which == "sharp":
        inst = build_sharp(args.k, args.g, args.b)
        measured = np.sort(np.linalg.eigvalsh(inst.matrix.T @ inst.matrix))
        print(f"advertised delta: {_fmt(inst.advertised_delta)}")
        print(f"measured delta: {_fmt(exact_ric(inst.matrix, inst.matrix.shape[1]).value)}")
        print("advertised spectrum: " + " ".join(_fmt(v) for v in inst.advertised_spectrum))
        print("measured spectrum:   " + " ".join(_fmt(v) for v in measured))
        y = inst.matrix @ inst.signal.dense()
        noise_note = ""
    else:
        if args.delta is None or args.epsilon is None:
            raise _UsageError("demo necessary needs DELTA and EPSILON")
        inst = build_necessary(args.k, args.g, args.b, args.delta, args.epsilon)
        print(f"requested delta: {_fmt(inst.delta)}")
        print(f"measured delta: {_fmt(exact_ric(inst.matrix, inst.matrix.shape[1]).value)}")
        print(f"theta: {_fmt(inst.theta)}")
        print(f"noise norm: {_fmt(float(np.linalg.norm(inst.noise)))} (bound {_fmt(inst.epsilon)})")
        y = inst.measurement()
        noise_note = " (noisy)"

    _print_correlation_table(inst.matrix, y, inst.prior, inst.signal.support)
    tie = AdversarialOutside(inst.signal.support, inst.prior.indices)
    remaining = inst.signal.sparsity - inst.prior.true_count(inst.signal.support)
    trace = omp_prior(inst.matrix, y, inst.prior, FixedIterations(remaining), tie)
    ok = success_check(trace, inst.signal, inst.prior)
    print(f"adversarial-tie run{noise_note}: selected {list(trace.selected_indices)}, "
          f"success={ok}")
    if ok:
        print("self-check failed: adversarial tie-break did not fail")
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_sweep(args) -> int:
    spec, configs = fileio.read_sweep_config(args.config)
    rows = run_sweep(spec, configs)
    fileio.write_sweep_csv(args.output, rows)
    print(f"wrote {len(rows)} rows to {args.output}")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="omp-prior", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("recover", help="run recovery on a problem file")
    p.add_argument("problem", help="path to a problem file")
    p.add_argument("--stop", nargs=2, metavar=("KIND", "VALUE"),
                   help="'iters N' or 'residual EPS' (default: residual at the "
                        "file's epsilon, else the remaining iteration count)")
    p.add_argument("--tie", choices=["lowest", "highest", "adversarial"], default="lowest")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("ric", help="exact restricted isometry constant of a matrix file")
    p.add_argument("matrix", help="path to a matrix file")
    p.add_argument("order", type=int)
    p.set_defaults(func=cmd_ric)

    p = sub.add_parser("demo", help="build and verify an adversarial instance")
    p.add_argument("which", choices=["sharp", "necessary"])
    p.add_argument("k", type=int)
    p.add_argument("g", type=int)
    p.add_argument("b", type=int)
    p.add_argument("delta", type=float, nargs="?")
    p.add_argument("epsilon", type=float, nargs="?")
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("sweep", help="run a Monte Carlo sweep config to CSV")
    p.add_argument("config", help="path to a sweep config file")
    p.add_argument("output", help="path for the CSV output")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (RankDeficientError, EigenFailureError, SelfCheckFailedError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (fileio.FileFormatError, InvalidCountsError, ThresholdViolatedError,
            OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OmpPriorError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
