"""Command-line interface: solve, inspect MECs and regions, cross-check, generate.

All commands read and write the JSON formats of the game and geometry modules;
reports are byte-deterministic for identical invocations.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from fractions import Fraction

from . import geometry, oracle, solver
from .game import GameFormatError, format_rational, parse_game, serialize_game
from .graph import mec_decomposition
from .solver import SolverConfig, SolverStallError, mo_bvi

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_NOT_CONVERGED = 2


def game_hash(game, objective) -> str:
    return hashlib.sha256(serialize_game(game, objective).encode()).hexdigest()


def build_report(game, objective, result, partitions) -> dict:
    """FrontierReport: per-state bound pieces, final partitions, gap, stats."""
    states = {}
    for s in game.states():
        states[game.state_names[s]] = {
            "lower": geometry.serialize_set(result.bounds.lower[s]),
            "upper": geometry.serialize_set(result.bounds.upper[s]),
        }
    region_entries = []
    for component in sorted(partitions, key=sorted):
        part = partitions[component]
        region_entries.append(
            {
                "mec": sorted(game.state_names[s] for s in component),
                "regions": [
                    {
                        "vertices": [
                            [format_rational(c) for c in v] for v in face
                        ],
                        "argmin": {
                            game.state_names[s]: sorted(actions)
                            for s, actions in part.argmin[face].items()
                        },
                    }
                    for face in part.faces()
                ],
            }
        )
    return {
        "game_hash": game_hash(game, objective),
        "dimension": objective.dimension,
        "states": states,
        "regions": region_entries,
        "gap": format_rational(result.gap),
        "iterations": result.iterations,
        "converged": result.converged,
        "stats": [
            {
                "iteration": st.iteration,
                "gap": format_rational(st.gap),
                "pieces": st.piece_count,
                "regions": list(st.region_counts),
            }
            for st in result.stats
        ],
    }


def validate_report(report: dict) -> None:
    """Structural validation of the published report layout."""

    def fail(msg):
        raise ValueError(f"invalid report: {msg}")

    for key in ("game_hash", "dimension", "states", "regions", "gap", "iterations",
                "converged", "stats"):
        if key not in report:
            fail(f"missing key {key!r}")
    n = report["dimension"]
    if not isinstance(n, int) or n < 1:
        fail("dimension must be a positive integer")
    Fraction(report["gap"])
    if not isinstance(report["converged"], bool):
        fail("converged must be a boolean")
    for name, bounds in report["states"].items():
        for side in ("lower", "upper"):
            for piece in bounds[side]:
                for gen in piece:
                    if len(gen) != n:
                        fail(f"generator of wrong dimension in state {name!r}")
                    for c in gen:
                        Fraction(c)
    for entry in report["regions"]:
        if "mec" not in entry or "regions" not in entry:
            fail("malformed region entry")
        for region in entry["regions"]:
            for v in region["vertices"]:
                if len(v) != n:
                    fail("region vertex of wrong dimension")
                for c in v:
                    Fraction(c)
    for row in report["stats"]:
        Fraction(row["gap"])


def dump_json(obj, path: str) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _load_game(path: str):
    with open(path) as fh:
        return parse_game(fh.read())


def cmd_solve(args) -> int:
    game, objective = _load_game(args.game)
    sink = None
    if args.progress:
        def sink(st):
            sys.stderr.write(
                f"{st.iteration}\t{format_rational(st.gap)}\t{st.piece_count}\t{st.wall_ms:.0f}\n"
            )
    config = SolverConfig(
        epsilon=Fraction(args.epsilon),
        max_iterations=args.max_iters,
        deflate_enabled=not args.no_deflate,
        progress_sink=sink,
    )
    result = mo_bvi(game, objective, config)
    partitions = solver.final_partitions(game, objective, result.bounds.lower)
    report = build_report(game, objective, result, partitions)
    validate_report(report)
    dump_json(report, args.out)
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def cmd_mecs(args) -> int:
    game, _ = _load_game(args.game)
    decomp = mec_decomposition(game)
    out = [
        {
            "states": sorted(game.state_names[s] for s in comp),
            "actions": {
                game.state_names[s]: sorted(actions) for s, actions in witness.items()
            },
        }
        for comp, witness in zip(decomp.components, decomp.witnesses)
    ]
    dump_json(out, args.out)
    return EXIT_OK


def cmd_regions(args) -> int:
    game, objective = _load_game(args.game)
    with open(args.report) as fh:
        report = json.load(fh)
    validate_report(report)
    n = objective.dimension
    lower = {
        game.index_of(name): geometry.deserialize_set(bounds["lower"], n)
        for name, bounds in report["states"].items()
    }
    partitions = solver.final_partitions(game, objective, lower)
    out = []
    for component in sorted(partitions, key=sorted):
        part = partitions[component]
        out.append(
            {
                "mec": sorted(game.state_names[s] for s in component),
                "regions": [
                    {
                        "vertices": [[format_rational(c) for c in v] for v in face],
                        "argmin": {
                            game.state_names[s]: sorted(actions)
                            for s, actions in part.argmin[face].items()
                        },
                    }
                    for face in part.faces()
                ],
            }
        )
    dump_json(out, args.out)
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    rng_seeds = range(args.seed, args.seed + args.count)
    failures = []
    for seed in rng_seeds:
        game, objective = oracle.random_game(
            n_states=5, n_actions=2, n_targets=1, seed=seed
        )
        exact = oracle.solve_single_dim_exact(game, objective.targets[0])
        intervals = solver.single_dim_solve(
            game, objective.targets[0], Fraction(1, 10**6)
        )
        for s in game.states():
            lo, hi = intervals[s]
            if not (lo <= exact[s] <= hi):
                failures.append(
                    {
                        "seed": seed,
                        "state": game.state_names[s],
                        "exact": format_rational(exact[s]),
                        "interval": [format_rational(lo), format_rational(hi)],
                    }
                )
    summary = {"checked": args.count, "failures": failures}
    dump_json(summary, args.out)
    sys.stderr.write(
        f"oracle-check: {args.count - len(failures)}/{args.count} games agree\n"
    )
    return EXIT_OK if not failures else EXIT_INPUT_ERROR


def cmd_gen(args) -> int:
    game, objective = oracle.random_game(
        n_states=args.states,
        n_actions=args.actions,
        n_targets=args.targets,
        stopping=args.stopping,
        branching=args.branching,
        seed=args.seed,
    )
    text = serialize_game(game, objective)
    if args.out == "-":
        sys.stdout.write(text + "\n")
    else:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sgpareto",
        description="Anytime Pareto frontier bounds for multi-target reachability games",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run bounded value iteration on a game file")
    p.add_argument("--game", required=True)
    p.add_argument("--epsilon", required=True, help="precision, exact rational or decimal")
    p.add_argument("--max-iters", type=int, default=None)
    p.add_argument("--no-deflate", action="store_true")
    p.add_argument("--out", default="-")
    p.add_argument("--progress", action="store_true")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("mecs", help="print the MEC decomposition")
    p.add_argument("--game", required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_mecs)

    p = sub.add_parser("regions", help="region partitions from a report's lower bounds")
    p.add_argument("--game", required=True)
    p.add_argument("--report", required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_regions)

    p = sub.add_parser("oracle-check", help="randomized cross-checks against exact values")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("gen", help="generate a reproducible random game")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--states", type=int, default=6)
    p.add_argument("--actions", type=int, default=2)
    p.add_argument("--targets", type=int, default=2)
    p.add_argument("--branching", type=int, default=2)
    p.add_argument("--stopping", action="store_true")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (GameFormatError, FileNotFoundError, json.JSONDecodeError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT_ERROR
    except SolverStallError as exc:
        sys.stderr.write(f"solver stall: {exc}\n")
        sys.stderr.write(json.dumps(exc.diagnostics, indent=2, sort_keys=True) + "\n")
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
