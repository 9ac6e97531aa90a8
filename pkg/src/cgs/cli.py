"""Command-line front end: ``python -m cgs {solve,reach,query} ...``.

Exit codes: 0 for a determinate result, 1 for runtime errors (bad
checkpoint, unparseable position), 2 for usage errors, 3 when a solve was
truncated by a ply limit, 4 when the value is unknown or positions were
left uncovered.
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from .checkpoint import Checkpoint, StatsWriter
from .dfa import contains
from .errors import CGSError
from .games import GameDef, Player, game_description, make_game
from .solver import Outcome, SolveConfig, _Run, finished_result, iter_reachable, solve

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_TRUNCATED = 3
EXIT_UNCOVERED = 4

MIN_FIT_POSITIONS = 10**4


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--game", choices=("nim", "breakthrough"), required=True)
    common.add_argument("--heaps", type=_positive, help="Nim: number of heaps")
    common.add_argument("--sticks", type=_positive, help="Nim: sticks per heap")
    common.add_argument("--width", type=_positive, help="Breakthrough: columns")
    common.add_argument("--height", type=_positive, help="Breakthrough: rows")
    common.add_argument("--checkpoint-dir", metavar="PATH")
    common.add_argument("--stats", metavar="PATH", help="stats.csv output path")
    common.add_argument("--workers", type=_positive, default=1)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="cgs", description="Set-based solver for Nim and Breakthrough.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="solve the initial position")
    p.add_argument("--mode", choices=("retro", "mitm"), default="mitm")
    p.add_argument("--forward-plies", type=_non_negative)
    p.add_argument("--backward-plies", type=_non_negative, default=0)
    p.add_argument("--resume", action="store_true")

    p = sub.add_parser("reach", parents=[common], help="per-ply reachable-set statistics")
    p.add_argument("--forward-plies", type=_non_negative)
    p.add_argument("--resume", action="store_true")

    p = sub.add_parser("query", parents=[common], help="look up one position in a solved checkpoint")
    p.add_argument("--position", required=True, metavar="TEXT",
                   help="e.g. '1,2,3 p1' (Nim) or '11/../22/.. p1' (Breakthrough, row 0 first)")
    return parser


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _non_negative(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def _description_from_args(parser, args) -> dict:
    """Validated game parameters; no sets are built here."""
    if args.game == "nim":
        needed = {"heaps": args.heaps, "sticks": args.sticks}
    else:
        needed = {"width": args.width, "height": args.height}
    missing = [f"--{k}" for k, v in needed.items() if v is None]
    if missing:
        parser.error(f"--game {args.game} requires {' and '.join(missing)}")
    try:
        return game_description(args.game, **needed)
    except ValueError as exc:
        parser.error(str(exc))


def _build(description) -> GameDef:
    params = {k: v for k, v in description.items() if k != "name"}
    return make_game(description["name"], **params)


def fit_exponent(points, min_positions=MIN_FIT_POSITIONS):
    """Least-squares slope of log(states) on log(positions), or ``None``.

    ``points`` are ``(positions, states)`` pairs; only pairs with at least
    ``min_positions`` positions enter the fit.
    """
    points = [(p, s) for p, s in points if p >= min_positions and s > 0]
    if len(points) < 2:
        return None
    x = np.log([float(p) for p, _ in points])
    y = np.log([float(s) for _, s in points])
    if np.ptp(x) == 0:
        return None
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def cmd_solve(args, description) -> int:
    config = SolveConfig(
        mode=args.mode,
        forward_plies=args.forward_plies,
        backward_plies=args.backward_plies,
        checkpoint_dir=args.checkpoint_dir,
        resume=args.resume,
        stats_path=args.stats,
        workers=args.workers,
    )
    # a finished checkpoint is reprinted without building the game
    result = finished_result(description, config)
    if result is None:
        result = solve(_build(description), config)
    print(result.value.short)
    print(f"uncovered: {result.uncovered}")
    print(f"witness ply: {result.witness_ply}")
    print(f"truncated: {'yes' if result.truncated else 'no'}")
    reach = [s for s in result.stats if s.kind == "R"]
    print(f"sets computed: {len(result.stats)}")
    if reach:
        peak = max(reach, key=lambda s: s.positions)
        print(f"reachable plies: {len(reach)}, peak R_{peak.forward_ply}: "
              f"{peak.positions} positions, {peak.states} states")
    largest = max(result.stats, key=lambda s: s.states, default=None)
    if largest is not None:
        print(f"largest set: {largest.kind} ({largest.states} states)")
    if result.truncated:
        return EXIT_TRUNCATED
    if result.value is Outcome.UNKNOWN or result.uncovered:
        return EXIT_UNCOVERED
    return EXIT_OK


def cmd_reach(args, description) -> int:
    game = _build(description)
    checkpoint = None
    if args.checkpoint_dir:
        config = {"command": "reach", "forward_plies": args.forward_plies}
        checkpoint = Checkpoint(args.checkpoint_dir, game, config, resume=args.resume)
    stats_path = args.stats or (f"{args.checkpoint_dir}/stats.csv" if args.checkpoint_dir else "stats.csv")
    stats = StatsWriter(stats_path, append=args.resume)
    run = _Run(checkpoint, stats, args.workers)
    print("ply  player  positions  states")
    for tagged in iter_reachable(game, args.forward_plies, run=run):
        s = tagged.set
        print(f"{tagged.forward_ply:>3}  {tagged.player.tag:>6}  {s.count():>9}  {s.num_states():>6}")
    points = [(r.positions, r.states) for r in stats.rows if r.kind == "R"]
    if checkpoint is not None:
        # resumed sets are loaded rather than recomputed, so read them from the manifest
        entries = [checkpoint.entry(name) for name in checkpoint.names()]
        points = [(int(e["positions"]), e["states"]) for e in entries if e["kind"] == "R"]
    c = fit_exponent(points)
    print(f"stats: {stats_path}")
    print(f"exponent: {'n/a' if c is None else f'{c:.4f}'}")
    return EXIT_OK


def classify(checkpoint: Checkpoint, string, player: Player) -> str:
    """WIN/LOSS/DRAW/UNKNOWN for ``player`` to move, by membership tests only."""
    for name in checkpoint.names():
        entry = checkpoint.entry(name)
        if entry["player"] != player.tag or entry["kind"] not in ("W", "L", "RW", "RL"):
            continue
        if contains(checkpoint.load(name), string):
            return "WIN" if entry["kind"] in ("W", "RW") else "LOSS"
    result = checkpoint.result or {}
    if result.get("mode") == "retro" and result.get("truncated") is False:
        return "DRAW"
    return "UNKNOWN"


def cmd_query(args, description) -> int:
    if not args.checkpoint_dir:
        raise CGSError("query needs --checkpoint-dir pointing at a solved checkpoint")
    game = _build(description)
    string, player = game.parse_position(args.position)
    checkpoint = Checkpoint.open_existing(args.checkpoint_dir, game)
    print(classify(checkpoint, string, player))
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(message)s")
    description = _description_from_args(parser, args)
    handler = {"solve": cmd_solve, "reach": cmd_reach, "query": cmd_query}[args.command]
    try:
        return handler(args, description)
    except (CGSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
