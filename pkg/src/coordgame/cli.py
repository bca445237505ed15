"""Command-line interface.

Exit codes: 0 solved or property holds, 1 no equilibrium exists or the
property fails, 2 input error, 3 undecided within the search cap.
"""

from __future__ import annotations

import argparse
import csv
import random
import sys
import time
from collections.abc import Sequence

from . import fixtures, oracle
from .chain_solver import detect_chain, grade_table, solve_ne_chain
from .coalition import is_strong_by_coalitions
from .cycle_solver import classify_cycle, solve_ne_cycle
from .dag_solver import solve_dag
from .dynamics import format_trace
from .errors import CapExceeded, GameError, PreconditionError
from .gamefile import classify, emit_game, emit_strategy, load_game, parse_strategy, to_dot
from .model import CoordinationGame, JointStrategy, is_nash
from .random_games import random_chain_game, random_cycle_game, random_dag_game, random_two_colour_game
from .reduction import eliminate_weights, parse_dimacs, reduce_cnf_to_game
from .solve import NONE_EXISTS, SOLVED, solve_game
from .two_colour_solver import solve_ne_two_colour

OK, FAILS, INPUT_ERROR, UNDECIDED = 0, 1, 2, 3

FIXTURES = {
    "three-colour": lambda: fixtures.three_colour_no_ne()[0],
    "weighted-triangle": fixtures.weighted_triangle_no_ne,
    "rotating-cycle": fixtures.rotating_cycle,
    "long-path": lambda: fixtures.long_path_cycle()[0],
    "square": lambda: fixtures.bidirectional_square()[0],
    "chain5": lambda: fixtures.five_cycle_chain()[0],
    "unreachable-strong": lambda: fixtures.unreachable_strong_game()[0],
    "bonus-triangle": fixtures.bonus_triangle_no_ne,
}

FIXTURE_STARTS = {
    "three-colour": lambda: fixtures.three_colour_no_ne()[1],
    "long-path": lambda: fixtures.long_path_cycle()[1],
    "square": lambda: fixtures.bidirectional_square()[1],
    "chain5": lambda: fixtures.five_cycle_chain()[1],
    "unreachable-strong": lambda: fixtures.unreachable_strong_game()[1],
}


def read_game(source: str) -> CoordinationGame:
    """A game file path, or ``fixture:NAME``."""
    if source.startswith("fixture:"):
        name = source[len("fixture:"):]
        if name not in FIXTURES:
            raise GameError(f"unknown fixture {name!r}; choose from {', '.join(sorted(FIXTURES))}")
        return FIXTURES[name]()
    return load_game(source)


def read_start(game: CoordinationGame, source: str | None, game_source: str = "") -> JointStrategy:
    """Strategy file, ``random:SEED``, or ``fixture`` for a fixture's sample start."""
    if source is None:
        return game.default_strategy()
    if source == "fixture":
        name = game_source[len("fixture:"):] if game_source.startswith("fixture:") else ""
        if name not in FIXTURE_STARTS:
            raise GameError(f"no sample start for {game_source!r}")
        return FIXTURE_STARTS[name]()
    if source.startswith("random:"):
        return game.random_strategy(random.Random(int(source[len("random:"):])))
    with open(source, encoding="utf-8") as fh:
        return parse_strategy(game, fh.read())


def write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def write_csv(path: str, rows: list[dict]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        if not rows:
            return
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)


def cmd_solve(args: argparse.Namespace) -> int:
    game = read_game(args.game)
    s0 = read_start(game, args.start, args.game)
    out = solve_game(game, args.target, s0, cap=args.cap, budget=args.budget)
    print(f"class: {out.classification.describe()}")
    if out.status != SOLVED:
        print(out.message)
        return FAILS if out.status == NONE_EXISTS else UNDECIDED
    assert out.strategy is not None
    print(f"method: {out.method}")
    if out.trace is not None:
        print(f"steps: {len(out.trace)} (coalition steps: {out.trace.coalition_steps()})")
        if args.trace:
            write_text(args.trace, format_trace(game, out.trace) + "\n")
    print(f"strategy: {emit_strategy(game, out.strategy).strip()}")
    if args.output:
        write_text(args.output, emit_strategy(game, out.strategy))
    if args.dot:
        write_text(args.dot, to_dot(game, out.strategy))
    return OK


def cmd_check(args: argparse.Namespace) -> int:
    game = read_game(args.game)
    with open(args.strategy, encoding="utf-8") as fh:
        s = parse_strategy(game, fh.read())
    k = args.k
    if k is None or k >= game.n:
        verdict = is_strong_by_coalitions(game, s)
        label = "strong equilibrium"
    elif k == 1:
        verdict = is_nash(game, s)
        label = "Nash equilibrium"
    else:
        verdict = oracle.k_equilibrium_brute(game, s, k, args.cap)
        label = f"{k}-equilibrium"
    if verdict:
        print(f"yes: {label}")
        return OK
    print(f"no: {label} fails ({verdict.reason}; witness {verdict.witness})")
    return FAILS


def cmd_analyze(args: argparse.Namespace) -> int:
    game = read_game(args.game)
    report = oracle.analyze_dynamics(game, args.mode, args.cap)
    summary = report.summary()
    for key, value in summary.items():
        print(f"{key}: {value}")
    if args.csv:
        write_csv(args.csv, [summary])
    return OK


def cmd_reduce(args: argparse.Namespace) -> int:
    with open(args.cnf, encoding="utf-8") as fh:
        formula = parse_dimacs(fh.read())
    game = reduce_cnf_to_game(formula)
    if args.unweighted:
        game = eliminate_weights(game, args.preserve_unit_edges)
    data = emit_game(game)
    if args.output:
        with open(args.output, "wb") as fh:
            fh.write(data)
        print(f"wrote {game.n} nodes, {len(game.edges)} edges to {args.output}")
    else:
        sys.stdout.write(data.decode("utf-8"))
    return OK


def cmd_trace(args: argparse.Namespace) -> int:
    game = read_game(args.game)
    s0 = read_start(game, args.start, args.game)
    dec = detect_chain(game)
    result = solve_ne_chain(game, s0, dec)
    rows = grade_table(result.iterations)
    if args.emit_grades:
        write_csv(args.emit_grades, rows)
    else:
        for row in rows:
            print(f"{row['grades_before']}  {row['mu_before']} -> cycle {row['cycle']}")
    if args.plot:
        from .plotting import plot_progress

        plot_progress([result.iterations[0].mu_before] + [it.mu_after for it in result.iterations]
                      if result.iterations else [], args.plot)
    print(f"steps: {len(result.trace)} of at most {result.trace.meta['bound']}")
    return OK


def _bench_instance(kind: str, rng: random.Random, size: int):
    if kind == "cycle":
        game = random_cycle_game(rng, size, rng.randint(2, 4))
        view = classify_cycle(game)
        start = time.perf_counter()
        result = solve_ne_cycle(game, game.random_strategy(rng), view=view)
        return len(result.trace), view.bound, time.perf_counter() - start
    if kind == "chain":
        game = random_chain_game(rng, size, (3, 5), rng.randint(2, 3))
        dec = detect_chain(game)
        start = time.perf_counter()
        result = solve_ne_chain(game, game.random_strategy(rng), dec)
        return len(result.trace), 3 * dec.v * dec.m**3, time.perf_counter() - start
    if kind == "dag":
        game = random_dag_game(rng, size, 3)
        start = time.perf_counter()
        _, trace = solve_dag(game, game.random_strategy(rng))
        return len(trace), classify(game).ne_bound, time.perf_counter() - start
    game = random_two_colour_game(rng, size)
    start = time.perf_counter()
    _, trace = solve_ne_two_colour(game, game.random_strategy(rng))
    return len(trace), 2 * size, time.perf_counter() - start


def cmd_bench(args: argparse.Namespace) -> int:
    rng = random.Random(args.seed)
    rows = []
    for size in args.sizes:
        for rep in range(args.reps):
            steps, bound, seconds = _bench_instance(args.cls, rng, size)
            rows.append({"class": args.cls, "size": size, "rep": rep, "steps": steps,
                         "bound": bound, "seconds": f"{seconds:.6f}"})
    if args.csv:
        write_csv(args.csv, rows)
    for size in args.sizes:
        mine = [r for r in rows if r["size"] == size]
        print(f"size {size}: longest {max(r['steps'] for r in mine)}, bound {mine[0]['bound']}")
    if args.plot:
        from .plotting import plot_bench

        plot_bench(rows, args.plot, title=args.cls)
    return OK


def cmd_classify(args: argparse.Namespace) -> int:
    game = read_game(args.game)
    print(classify(game).describe())
    return OK


def cmd_dot(args: argparse.Namespace) -> int:
    game = read_game(args.game)
    s = None
    if args.strategy:
        with open(args.strategy, encoding="utf-8") as fh:
            s = parse_strategy(game, fh.read())
    text = to_dot(game, s)
    if args.output:
        write_text(args.output, text)
    else:
        sys.stdout.write(text)
    return OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coordgame", description="Coordination games on weighted directed graphs.")
    sub = parser.add_subparsers(dest="command", required=True)
    game_help = "game file, or fixture:NAME (" + ", ".join(sorted(FIXTURES)) + ")"

    p = sub.add_parser("solve", help="compute a Nash or strong equilibrium")
    p.add_argument("game", help=game_help)
    p.add_argument("--target", choices=["ne", "se"], default="ne")
    p.add_argument("--start", help="strategy file, random:SEED or fixture")
    p.add_argument("--trace", help="write the improvement path here")
    p.add_argument("--output", "-o", help="write the final strategy here")
    p.add_argument("--dot", help="write a DOT drawing of the result here")
    p.add_argument("--cap", type=int, default=oracle.DEFAULT_CAP, help="joint strategies scanned by the fallback")
    p.add_argument("--budget", type=int, default=oracle.SEARCH_BUDGET, help="assignments tried by the fallback search")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check", help="test whether a strategy is a k-equilibrium")
    p.add_argument("game", help=game_help)
    p.add_argument("--strategy", required=True)
    p.add_argument("--k", type=int, help="coalition size; default: any size (strong)")
    p.add_argument("--cap", type=int, default=oracle.DEFAULT_CAP)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("analyze", help="exhaustive improvement-graph analysis")
    p.add_argument("game", help=game_help)
    p.add_argument("--mode", choices=["single", "coalition"], default="single")
    p.add_argument("--csv")
    p.add_argument("--cap", type=int, default=None)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("reduce", help="build the game of a 3-CNF formula")
    p.add_argument("--cnf", required=True, help="DIMACS file")
    p.add_argument("--unweighted", action="store_true", help="replace weights by relay nodes")
    p.add_argument("--preserve-unit-edges", action="store_true", help="keep weight-1 edges direct")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("trace", help="grade and progress table of the chain solver")
    p.add_argument("game", help=game_help)
    p.add_argument("--start", help="strategy file, random:SEED or fixture")
    p.add_argument("--emit-grades", help="CSV output path")
    p.add_argument("--plot", help="PNG of the progress measure")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("bench", help="path lengths on random instances")
    p.add_argument("--class", dest="cls", choices=["cycle", "chain", "dag", "two-colour"], required=True)
    p.add_argument("--sizes", type=int, nargs="+", required=True)
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv")
    p.add_argument("--plot")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("classify", help="structural class and path bounds")
    p.add_argument("game", help=game_help)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("dot", help="DOT drawing of a game")
    p.add_argument("game", help=game_help)
    p.add_argument("--strategy")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_dot)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (GameError, PreconditionError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    except CapExceeded as exc:
        print(f"undecided: {exc}", file=sys.stderr)
        return UNDECIDED


if __name__ == "__main__":
    sys.exit(main())
