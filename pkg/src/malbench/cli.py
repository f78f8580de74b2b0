"""Command line: enumerate, run, report, stats, figure.

Exit codes: 0 success, 2 configuration or usage error, 3 runtime failure.
The output directory defaults to ``$MALBENCH_OUTPUT_DIR`` or ``./malbench-output``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import ConfigError, load_config, output_dir

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3


class UsageError(Exception):
    pass


def _cmd_enumerate(args) -> int:
    from .games import GameClass, classify, enumerate_distinct_2x2, save_game

    games = enumerate_distinct_2x2(args.game_class)
    root = output_dir(args.out) / "games"
    try:
        root.mkdir(parents=True, exist_ok=True)
        for game in games:
            save_game(game, root / f"{game.name}.json")
        manifest = {
            "class": args.game_class,
            "count": len(games),
            "games": [{"name": g.name, "class": classify(g).value, "file": f"{g.name}.json"} for g in games],
        }
        (root / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    except OSError as exc:
        print(f"error: cannot write games to {root}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    nc = sum(classify(g) is GameClass.NO_CONFLICT for g in games)
    print(f"{len(games)} games ({nc} no-conflict, {len(games) - nc} conflict) written to {root}")
    return EXIT_OK


def _cmd_run(args) -> int:
    from .harness import iter_suite
    from .store import write_store

    overrides = {
        "suite": args.suite,
        "sweeps": args.sweeps,
        "repetitions": args.repetitions,
        "games": args.games,
        "roster": args.roster,
        "seed": args.seed,
        "workers": args.workers,
    }
    if args.keep_logs:
        overrides["keep_logs"] = True
    config = load_config(args.config, overrides)
    target = Path(args.store) if args.store else output_dir(args.out) / f"{config.suite}-seed{config.seed}"
    try:
        count = write_store(target, config, iter_suite(config))
    except KeyboardInterrupt:
        print(f"interrupted; partial store at {target} is flagged incomplete", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"error: cannot write result store {target}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(f"{count} rows written to {target}")
    return EXIT_OK


def _load(path):
    from .store import load_store

    try:
        return load_store(path)
    except (OSError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def _cmd_report(args) -> int:
    from .report import ReportTable, overall_text

    summaries = {}
    csv_parts = []
    for path in args.stores:
        store = _load(path)
        if not store.complete:
            print(f"warning: {path} is incomplete", file=sys.stderr)
        table = ReportTable.from_rows(store.suite, store.rows, store.complete, groups=not args.no_groups)
        print(table.to_text())
        csv_parts.append(table.to_csv())
        summaries[store.suite] = table.rows
    if args.normalized:
        print(overall_text(summaries))
    if args.csv:
        header, *_ = csv_parts[0].splitlines(keepends=True)
        body = "".join("".join(p.splitlines(keepends=True)[1:]) for p in csv_parts)
        Path(args.csv).write_text(header + body)
    return EXIT_OK


def _cmd_stats(args) -> int:
    from .learners import DISPLAY_NAMES
    from .stats import METRICS, compare, equivalence_groups, group_notation

    if args.metric not in METRICS:
        raise UsageError(f"unknown metric {args.metric!r}; valid metrics: {', '.join(METRICS)}")
    store = _load(args.store)
    first, second = args.pair
    try:
        result = compare(store.rows, args.metric, first, second, args.level)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    except ValueError as exc:
        raise UsageError(f"cannot test {first} against {second}: {exc}") from None
    verdict = "significant" if result.significant else "equivalent"
    print(f"{args.metric}: {first} vs {second}: t = {result.t:.4f}, df = {result.df}, "
          f"p = {result.p_value:.4g} -> {verdict} at {args.level:g}")
    groups = equivalence_groups(store.rows, args.metric, args.level)
    print(f"groups: {group_notation(groups, DISPLAY_NAMES)}")
    return EXIT_OK


def _cmd_figure(args) -> int:
    from .figure import emit_polytope_figure
    from .games import PARETO_EXAMPLE, load_game

    game = load_game(args.game) if args.game else PARETO_EXAMPLE
    if game.player_count != 2:
        raise UsageError("the polytope figure needs a 2-player game")
    target = Path(args.output) if args.output else output_dir(args.out) / f"{game.name or 'game'}-polytope.svg"
    target.parent.mkdir(parents=True, exist_ok=True)
    emit_polytope_figure(game, target)
    print(f"figure written to {target}")
    return EXIT_OK


def _positive(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {value}")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="malbench", description=__doc__.splitlines()[0])
    parser.add_argument("--out", help="output directory (default: $MALBENCH_OUTPUT_DIR or ./malbench-output)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="write the structurally distinct 2x2 games")
    p.add_argument("--class", dest="game_class", choices=["no-conflict", "conflict", "all"], default="all")
    p.set_defaults(func=_cmd_enumerate)

    p = sub.add_parser("run", help="run a suite from a YAML/JSON config")
    p.add_argument("config")
    p.add_argument("--store", help="result store directory")
    p.add_argument("--suite", choices=["no-conflict", "conflict", "random"])
    p.add_argument("--sweeps", type=int)
    p.add_argument("--repetitions", type=int)
    p.add_argument("--games", type=int)
    p.add_argument("--roster", help="comma-separated learner names")
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=_positive)
    p.add_argument("--keep-logs", action="store_true", help="store per-step strategies, actions and payoffs")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("report", help="print result tables")
    p.add_argument("stores", nargs="+")
    p.add_argument("--normalized", action="store_true", help="add the overall normalized summary")
    p.add_argument("--csv", help="also write the tables as CSV")
    p.add_argument("--no-groups", action="store_true", help="skip significance groupings")
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("stats", help="paired t-test between two algorithms")
    p.add_argument("store")
    p.add_argument("--metric", required=True)
    p.add_argument("--pair", nargs=2, required=True, metavar=("ALG1", "ALG2"))
    p.add_argument("--level", type=float, default=0.05)
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("figure", help="payoff polytope and Pareto front of a 2-player game")
    p.add_argument("--game", help="game file (default: the Pareto-front example)")
    p.add_argument("--output", help="SVG path")
    p.set_defaults(func=_cmd_figure)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        return args.func(args)
    except (ConfigError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # surfaced as a runtime failure with a message
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
