"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 numeric failure, 3 resource or schema
failure.  Phases cross this boundary in units of pi only.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import analysis
from .errors import (ConvergenceError, DomainError, InvalidArgumentError, MetricUndefinedError, SchemaError,
                     UnsupportedLengthError)
from .sequences import CompositeSequence, nb_sequence, pb_sequence, wimperis_nb, wimperis_pb
from .solver import (DEFAULT_SEED, QUOTED_HWHM, NbProblem, NbSolution, SolverOptions, load_reference_table,
                     match_table, refine, solve_matched, solve_nb, table_phases, verify_reference_table)

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_RESOURCE = 0, 1, 2, 3
DEFAULT_LEVELS = tuple(round(0.1 * k, 1) for k in range(1, 11))
PROFILE_FAMILIES = ("nb", "pb", "wimperis-nb", "wimperis-pb", "custom", "all-levels")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _shared_flags() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--n", type=int, help="number of pulses in the NB sequence (even)")
    shared.add_argument("--p", type=float, help="target transition probability")
    shared.add_argument("--points", type=int, default=1001, help="profile grid size (default 1001)")
    shared.add_argument("--eps-min", type=float, default=-1.0)
    shared.add_argument("--eps-max", type=float, default=1.0)
    shared.add_argument("--phases", type=Path, help="sequence or phase-table JSON file")
    shared.add_argument("--out", type=Path, help="write output here instead of stdout")
    shared.add_argument("--format", choices=("csv", "json"), default=None)
    shared.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"multi-start seed (default {DEFAULT_SEED})")
    shared.add_argument("--threads", type=int, default=None, help="solver threads (default: all cores)")
    shared.add_argument("--match-table", action="store_true",
                        help="select the solution closest to the embedded phase table")
    return shared


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cp-synth", description="Narrowband and passband composite theta pulses.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    shared = _shared_flags()

    solve = sub.add_parser("solve", parents=[shared], help="solve NB phases for (N, p)")
    solve.add_argument("--all", action="store_true", help="print every distinct solution")
    solve.add_argument("--starts", type=int, default=SolverOptions.n_starts, help="random multi-start count")

    prof = sub.add_parser("profile", parents=[shared], help="excitation profile as CSV")
    prof.add_argument("--family", choices=PROFILE_FAMILIES, default="nb")
    prof.add_argument("--base", choices=("nb", "pb", "wimperis-nb", "wimperis-pb"), default="nb",
                      help="family used by --family all-levels")
    prof.add_argument("--levels", type=str, default=None,
                      help="comma-separated probabilities for all-levels (default 0.1,...,1.0)")

    for name in ("table", "verify"):
        sub.add_parser(name, parents=[shared], help="verify the embedded phase table")

    ana = sub.add_parser("analyze", parents=[shared], help="profile metrics")
    metric = ana.add_mutually_exclusive_group(required=True)
    metric.add_argument("--hwhm", action="store_true")
    metric.add_argument("--suppression-order", action="store_true")
    metric.add_argument("--flatness", action="store_true")
    ana.add_argument("--family", choices=("nb", "pb", "wimperis-nb", "wimperis-pb", "custom"), default="nb")
    ana.add_argument("--at", choices=("1", "-1", "both"), default="both", help="wing for --suppression-order")
    ana.add_argument("--dps", type=int, default=60, help="decimal digits for --suppression-order")
    return parser


# helpers -------------------------------------------------------------------

def _options(args) -> SolverOptions:
    n_starts = getattr(args, "starts", SolverOptions.n_starts)
    return SolverOptions(n_starts=n_starts, seed=args.seed, threads=args.threads)


def _require(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise UsageError(f"--{name} is required")


def _problem(n, p) -> NbProblem:
    if n is None:
        raise UsageError("--n is required")
    if n % 2 or n < 2:
        raise UsageError(f"--n must be even and >= 2 (NB sequences use an even number of pulses), got {n}")
    if p is None:
        raise UsageError("--p is required")
    if not 0.0 <= p <= 1.0:
        raise UsageError(f"--p must lie in [0, 1], got {p}")
    return NbProblem(n, p)


def _check_grid(args):
    if args.points < 1:
        raise UsageError("--points must be positive")
    if args.points > 1 and not args.eps_max > args.eps_min:
        raise UsageError("--eps-max must exceed --eps-min")


def _read_json(path: Path):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc


def load_sequence_file(path: Path) -> CompositeSequence:
    """Sequence JSON, or a phase-table entry (NB phases phi_2 ... phi_N)."""
    doc = _read_json(path)
    if isinstance(doc, dict) and "areas_pi" in doc:
        return CompositeSequence.from_dict(doc)
    if isinstance(doc, dict) and "phases_pi" in doc and "N" in doc:
        phases = doc["phases_pi"]
        if not isinstance(phases, list) or len(phases) != doc["N"] - 1:
            raise SchemaError("phase-table entry needs N-1 phases")
        return nb_sequence([math.pi * float(f) for f in phases])
    raise SchemaError(f"{path} is neither a sequence nor a phase-table document")


def _half_pi_solution(n, options) -> NbSolution:
    return solve_matched(NbProblem(n, 0.5), options)


def _sequence_for(family, n, p, options) -> CompositeSequence:
    if family == "nb":
        return solve_matched(_problem(n, p), options).sequence()
    if family == "pb":
        _problem(n, p)
        return pb_sequence(_half_pi_solution(n, options).phases, p)
    if p is None or not 0.0 <= p <= 1.0:
        raise UsageError("--p in [0, 1] is required")
    if family == "wimperis-nb":
        return wimperis_nb(p)
    if family == "wimperis-pb":
        return wimperis_pb(p)
    raise UsageError(f"family {family!r} needs --phases")


def _emit(text: str, out):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# commands --------------------------------------------------------------------

def cmd_solve(args) -> int:
    problem = _problem(args.n, args.p)
    options = _options(args)
    if args.format == "csv":
        raise UsageError("solve emits JSON only")
    sols = solve_nb(problem, options)
    if args.match_table:
        ref = table_phases(problem.n, problem.p)
        if ref is None:
            raise UsageError(f"the phase table has no entry for N={problem.n}, p={problem.p}")
        sols = [match_table(sols, ref)[0]]
    payload = [s.to_dict() for s in sols] if args.all else sols[0].to_dict()
    _emit(_dump(payload), args.out)
    return EXIT_OK


def _profile_columns(args, options):
    grid = analysis.default_grid(args.points, args.eps_min, args.eps_max)
    if args.family == "all-levels":
        levels = DEFAULT_LEVELS
        if args.levels:
            try:
                levels = tuple(float(x) for x in args.levels.split(","))
            except ValueError as exc:
                raise UsageError(f"--levels: {exc}") from exc
        half = _half_pi_solution(args.n, options) if args.base == "pb" else None
        columns = {}
        for level in levels:
            if half is not None:
                seq = pb_sequence(half.phases, level)
            else:
                seq = _sequence_for(args.base, args.n, level, options)
            columns[f"p={level:g}"] = analysis.excitation_profile(seq, grid).probabilities
        return grid, columns, None
    if args.phases is not None:
        seq = load_sequence_file(args.phases)
    else:
        seq = _sequence_for(args.family, args.n, args.p, options)
    return grid, {"probability": analysis.excitation_profile(seq, grid).probabilities}, seq


def cmd_profile(args) -> int:
    _check_grid(args)
    grid, columns, seq = _profile_columns(args, _options(args))
    if args.format == "json":
        payload = {"family": args.family, "epsilon": grid.tolist(),
                   **{k: np.asarray(v).tolist() for k, v in columns.items()}}
        if seq is not None:
            payload["sequence"] = seq.to_dict()
        _emit(_dump(payload), args.out)
    else:
        _emit(analysis.profile_csv(grid, columns), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    table = load_reference_table()
    report = verify_reference_table(table, points=args.points)
    if args.format == "json":
        _emit(_dump(report.to_dict()), args.out)
    else:
        _emit(report.format() + "\n", args.out)
    return EXIT_OK if report.passed else EXIT_NUMERIC


def _analysis_target(args, options):
    """Sequence to analyze plus NB metadata (N, half) needed for references."""
    if args.phases is not None:
        seq = load_sequence_file(args.phases)
        family = seq.family
    else:
        family = args.family
        p = args.p if args.p is not None else 0.5
        if family in ("nb", "pb"):
            _problem(args.n, p)
        seq = _sequence_for(family, args.n, p, options)
    return seq, family


def _extended_sequence(seq: CompositeSequence, family: str, dps: int) -> CompositeSequence:
    """Rebuild NB/PB sequences from Newton-polished phases."""
    if family == "nb":
        n = len(seq)
        sol = NbSolution.from_phases(NbProblem(n, min(1.0, seq.probability(0.0))), seq.phases[1:])
        return nb_sequence(refine(sol, dps=dps))
    if family == "pb":
        n = len(seq) // 2
        half = NbSolution.from_phases(NbProblem(n, 0.5), seq.phases[1:n])
        target = math.cos(0.5 * math.pi * seq.meta.get("twin_phase_pi", 0.0)) ** 2
        return pb_sequence(refine(half, dps=dps), target)
    return seq


def cmd_analyze(args) -> int:
    options = _options(args)
    seq, family = _analysis_target(args, options)
    nb_len = len(seq) if family == "nb" else len(seq) // 2 if family == "pb" else None
    out = {"family": family, "pulses": len(seq)}
    if args.hwhm:
        _check_grid(args)
        prof = analysis.excitation_profile(seq, analysis.default_grid(args.points, args.eps_min, args.eps_max))
        out.update(metric="hwhm", measured=analysis.hwhm_measured(prof))
        if family == "nb":
            out.update(N=len(seq), analytic=analysis.hwhm(len(seq)), quoted=QUOTED_HWHM.get(len(seq)))
    elif args.suppression_order:
        ext = _extended_sequence(seq, family, args.dps)
        ends = (1, -1) if args.at == "both" else (int(args.at),)
        out.update(metric="suppression_order",
                   measured={str(e): analysis.suppression_order(ext, e, dps=args.dps) for e in ends})
        if nb_len is not None:
            out["analytic"] = 2 * (nb_len - 1)
    else:
        quad = (len(seq) - 1) * (math.pi / 2) ** 2 if family == "nb" else 0.0
        derivs = analysis.profile_derivatives_at_zero(seq)
        out.update(metric="flatness", derivatives={str(k): v for k, v in derivs.items()},
                   order=analysis.central_flatness_order(seq, quad), analytic_order=4 if nb_len else None,
                   quadratic_coefficient=quad)
    _emit(_dump(out), args.out)
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "profile": cmd_profile, "table": cmd_verify, "verify": cmd_verify,
            "analyze": cmd_analyze}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.threads is not None and args.threads < 1:
            raise UsageError("--threads must be positive")
        return COMMANDS[args.command](args)
    except (UsageError, UnsupportedLengthError, DomainError, InvalidArgumentError) as exc:
        parser.print_usage(sys.stderr)
        print(f"cp-synth: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, MetricUndefinedError) as exc:
        print(f"cp-synth: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except SchemaError as exc:
        print(f"cp-synth: resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
