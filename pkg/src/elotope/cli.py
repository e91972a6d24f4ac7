"""Command-line interface.

Exit codes: 0 success, 2 invalid input, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io
from .chain import ChainConfig, run_chain
from .game import PayoffMatrix, ValidationError, advantage_from_payoff, uniform_selection
from .hodge import frobenius_norm, hodge_decompose, is_stacm
from .intransitivity import measure_from_records, measure_intransitivity
from .rps import EXPERIMENT_HEADER, TRUTH_HEADER, as_tuples, run_experiment, truth_curve
from .solver import DEFAULT_MAX_ITER, DEFAULT_TOL, NotConverged, sample_elotope, solve_final_score

EXIT_OK, EXIT_INPUT, EXIT_NONCONVERGED = 0, 2, 3


class InputError(Exception):
    pass


def parse_grid(text: str) -> list[float]:
    """``start:step:end`` (inclusive end) or a comma-separated list of values."""
    try:
        if ":" in text:
            start, step, end = (float(x) for x in text.split(":"))
            if step <= 0 or end < start:
                raise ValueError
            n = int(np.floor((end - start) / step + 1e-9))
            return [round(start + k * step, 12) for k in range(n + 1)]
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"bad grid {text!r}; use start:step:end or a comma list") from None


def parse_ints(text: str) -> list[int]:
    try:
        values = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"bad integer list {text!r}") from None
    if not values:
        raise InputError("empty integer list")
    return values


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        io.atomic_write(out, text)


def _load_selection(path: str, m: int):
    if path == "uniform":
        return uniform_selection(m)
    return io.load_matrix(path, "selection")


def _check_dims(payoff, selection) -> None:
    if payoff.dim != selection.dim:
        raise InputError(f"dimension mismatch: payoff is {payoff.dim}, selection is {selection.dim}")


def cmd_decompose(args) -> int:
    adv = io.load_matrix(args.input, "advantage")
    transitive, cyclic = hodge_decompose(adv.values)
    doc = {
        "transitive": transitive.tolist(),
        "cyclic": cyclic.tolist(),
        "transitive_norm": frobenius_norm(transitive),
        "cyclic_norm": frobenius_norm(cyclic),
        "is_stacm": is_stacm(adv.values, args.tol),
    }
    _emit(io.dumps_json(doc), None)
    return EXIT_OK


def cmd_solve(args) -> int:
    payoff = io.load_matrix(args.payoff, "payoff")
    selection = _load_selection(args.selection, payoff.dim)
    _check_dims(payoff, selection)
    try:
        report = solve_final_score(payoff, selection, tol=args.tol, max_iter=args.max_iter)
    except NotConverged as exc:
        _emit(io.dumps_json(exc.report.as_dict()), None)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    _emit(io.dumps_json(report.as_dict()), None)
    return EXIT_OK


def cmd_simulate(args) -> int:
    payoff = io.load_matrix(args.payoff, "payoff")
    selection = _load_selection(args.selection, payoff.dim)
    _check_dims(payoff, selection)
    if args.steps < 0 or args.stride < 1:
        raise InputError("--steps must be >= 0 and --stride >= 1")
    config = ChainConfig(payoff, selection, gain=args.eta, seed=args.seed)
    traj = run_chain(config, args.steps, args.stride)
    text = io.write_csv(None, io.trajectory_header(payoff.dim), io.trajectory_rows(traj))
    _emit(text, args.out_trajectory)
    if args.out_matches is not None:
        io.write_csv(args.out_matches, io.MATCH_HEADER,
                     io.match_rows(traj.pair_i, traj.pair_j, traj.winners))
    return EXIT_OK


def cmd_elotope(args) -> int:
    payoff = io.load_matrix(args.payoff, "payoff")
    if args.trees < 0 or args.random_q < 0:
        raise InputError("--trees and --random-q must be nonnegative")
    try:
        sample = sample_elotope(payoff, tree_budget=args.trees, random_q_budget=args.random_q,
                                seed=args.seed)
    except NotConverged as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    header = ["source", *(f"r_{k}" for k in range(payoff.dim))]
    rows = ([src, *(float(x) for x in pt)] for src, pt in zip(sample.sources, sample.points))
    _emit(io.write_csv(None, header, rows), args.out)
    return EXIT_OK


def cmd_measure(args) -> int:
    fmt = args.format
    if fmt is None:
        fmt = "matches" if Path(args.input).suffix.lower() == ".csv" else "matrix"
    if fmt == "matrix":
        matrix = io.load_matrix(args.input, ("advantage", "payoff"))
        if isinstance(matrix, PayoffMatrix):
            matrix = advantage_from_payoff(matrix)
        report = measure_intransitivity(matrix)
    else:
        records = io.read_match_log(args.input)
        m = args.players
        if m is None:
            m = 1 + max((max(r.player_i, r.player_j) for r in records), default=-1)
        if m < 2:
            raise InputError("match log needs at least two players (see --players)")
        report = measure_from_records(records, m, args.smoothing)
    _emit(io.dumps_json(report.as_dict()), None)
    return EXIT_OK


def cmd_experiment(args) -> int:
    t_values = parse_grid(args.t_grid)
    if not t_values:
        raise InputError("empty --t-grid")
    if any(not 0 <= t < 1 for t in t_values):
        raise InputError("every t must lie in [0, 1)")
    if args.truth_only:
        text = io.write_csv(None, TRUTH_HEADER, as_tuples(truth_curve(args.family, t_values)))
    else:
        games = parse_ints(args.games)
        if any(n < 1 for n in games) or args.trials < 1:
            raise InputError("--games entries and --trials must be positive")
        rows = run_experiment(args.family, t_values, games, args.trials, args.seed,
                              smoothing=args.smoothing, workers=args.workers)
        text = io.write_csv(None, EXPERIMENT_HEADER, as_tuples(rows))
    _emit(text, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="elotope",
        description="Elo final scores, Hodge decomposition and intransitivity of pairwise games.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="split an advantage matrix into transitive and cyclic parts")
    p.add_argument("input", help="advantage matrix JSON")
    p.add_argument("--tol", type=float, default=1e-9, help="STACM tolerance on the cyclic norm")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("solve", help="final Elo score for a payoff and selection matrix")
    p.add_argument("payoff", help="payoff matrix JSON")
    p.add_argument("selection", help="selection matrix JSON, or 'uniform'")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("simulate", help="run the Elo Markov chain")
    p.add_argument("payoff")
    p.add_argument("selection", help="selection matrix JSON, or 'uniform'")
    p.add_argument("--steps", type=int, default=10_000)
    p.add_argument("--eta", type=float, default=0.1, help="Elo gain")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stride", type=int, default=1, help="record every N-th state")
    p.add_argument("--out-trajectory", help="trajectory CSV (default: stdout)")
    p.add_argument("--out-matches", help="match log CSV")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("elotope", help="sample final scores over many selection matrices")
    p.add_argument("payoff")
    p.add_argument("--trees", type=int, default=16, help="spanning-tree budget")
    p.add_argument("--random-q", type=int, default=0, help="number of random connected Q")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_elotope)

    p = sub.add_parser("measure", help="intransitivity of a matrix or a match log")
    p.add_argument("input", help="matrix JSON (advantage or payoff) or match-log CSV")
    p.add_argument("--format", choices=("matrix", "matches"),
                   help="override detection by extension (.csv = matches)")
    p.add_argument("--players", type=int, help="number of players in a match log")
    p.add_argument("--smoothing", type=float, default=0.5)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("experiment", help="Rock-Paper-Scissors validation tables")
    p.add_argument("--family", choices=("rs", "rps"), required=True)
    p.add_argument("--t-grid", default="0:0.05:0.95",
                   help="start:step:end with inclusive end, or a comma list (default %(default)s)")
    p.add_argument("--games", default="100,1000,10000", help="games per pair, comma list")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--smoothing", type=float, default=0.5)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--truth-only", action="store_true", help="emit only family,t,i_truth")
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    except OSError as exc:
        print(f"error: {exc.filename or ''}: {exc.strerror or exc}", file=sys.stderr)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
