"""Acceptance suite: one PASS/FAIL line per criterion.

Each test prints its verdict line (visible with ``pytest -s`` or in the
``-v`` report) and then asserts it. Random instances come from fixed seeds.
"""

from __future__ import annotations

import math
import random
import statistics
import time

import pytest

from coordgame import oracle
from coordgame.chain_solver import (
    check_grade_transition,
    detect_chain,
    guard,
    mu,
    nbr,
    prefix,
    solve_ne_chain,
    solve_se_chain,
)
from coordgame.coalition import max_profitable_coalition_to_colour, unicolour_cycle_witness
from coordgame.cycle_solver import CycleVariant, lift_to_strong, solve_ne_cycle
from coordgame.dag_solver import potential_vector, solve_dag, topological_order
from coordgame.dynamics import format_trace
from coordgame.fixtures import (
    PROGRESS_RUN,
    bonus_triangle_no_ne,
    grade_examples,
    long_path_cycle,
    rotating_cycle,
    three_colour_no_ne,
    unreachable_strong_game,
    weighted_triangle_no_ne,
)
from coordgame.model import CoordinationGame, is_nash, is_profitable_deviation, payoffs
from coordgame.random_games import (
    random_chain_game,
    random_cycle_game,
    random_dag_game,
    random_game,
    random_two_colour_game,
    sparse_two_colour_game,
)
from coordgame.reduction import (
    brute_sat,
    build_gadget,
    cnf_corpus,
    complete_from_assignment,
    eliminate_weights,
    reduce_cnf_to_game,
)
from coordgame.two_colour_solver import solve_ne_two_colour, solve_se_two_colour


@pytest.fixture
def verdict(capsys):
    def report(number: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
        assert ok, detail

    return report


def test_criterion_01_fixtures(verdict):
    problems = []
    game, s = three_colour_no_ne()
    if payoffs(game, s) != (0, 1, 2, 1, 1, 1, 0, 0, 0):
        problems.append(f"payoffs {payoffs(game, s)}")
    cases = [("three-colour game", game), ("weighted triangle", weighted_triangle_no_ne())]
    for x in (True, False):
        for y in (True, False):
            for z in (True, False):
                cases.append((f"gadget({x},{y},{z})", build_gadget(x, y, z)))
    slowest = 0.0
    for name, g in cases:
        start = time.perf_counter()
        count = len(oracle.enumerate_nash(g))
        elapsed = time.perf_counter() - start
        slowest = max(slowest, elapsed)
        if count:
            problems.append(f"{name} has {count} Nash equilibria")
        if elapsed >= 1.0:
            problems.append(f"{name} took {elapsed:.2f}s")
    verdict(1, not problems, "; ".join(problems) or f"payoffs exact, {len(cases)} games without NE, slowest {slowest:.3f}s")


def test_criterion_02_cycle_bounds(verdict):
    rng = random.Random(2)
    problems = []
    counts = {}
    strong_checked = 0
    start = time.perf_counter()
    for variant in ("le1-bonus", "le1-weight", "2-bonus", "2-weight"):
        counts[variant] = 0
        while counts[variant] < 1000:
            n = rng.randint(3, 12)
            l = rng.randint(1, 4)
            try:
                game = random_cycle_game(rng, n, l, variant, max_weight=5, max_bonus=3)
            except ValueError:
                continue
            counts[variant] += 1
            result = solve_ne_cycle(game, game.random_strategy(rng))
            bound = CycleVariant(variant).bound(n)
            if len(result.trace) > bound or not is_nash(game, result.strategy):
                problems.append(f"{variant} n={n}: {len(result.trace)} steps, bound {bound}")
            if n <= 8:
                strong, _ = lift_to_strong(game, result.strategy)
                strong_checked += 1
                if not oracle.is_strong_brute(game, strong):
                    problems.append(f"{variant} n={n}: lifted strategy not strong")
    elapsed = time.perf_counter() - start
    if elapsed >= 30:
        problems.append(f"took {elapsed:.1f}s")
    detail = f"{sum(counts.values())} cycles, {strong_checked} strong checks, {elapsed:.1f}s"
    verdict(2, not problems, "; ".join(problems[:5]) or detail)


def test_criterion_03_long_path(verdict):
    game, s0 = long_path_cycle(6)
    result = solve_ne_cycle(game, s0, variant="le1-weight")
    movers = [step.deviators[0] for step in result.trace.steps]
    colours = "".join(game.colour_name(step.new_colours[0]) for step in result.trace.steps)
    expected_movers = [1, 2, 3, 6, 1, 2, 3, 4, 5, 6, 1, 2, 3]
    ok = (
        len(result.trace) == 13
        and movers == expected_movers
        and colours == "aaaddddcccccc"
        and result.strategy.names(game) == ("c",) * 6
    )
    verdict(3, ok, f"length {len(result.trace)} (3n-5 = 13), movers {movers}" + ("" if ok else "\n" + format_trace(game, result.trace)))


def test_criterion_04_chain_solver(verdict):
    rng = random.Random(4)
    problems = []
    decreases = transitions_bad = 0
    iterations = 0
    start = time.perf_counter()
    for _ in range(200):
        m = rng.randint(2, 6)
        l = rng.randint(1, 3)
        game = random_chain_game(rng, m, (3, 5), l)
        dec = detect_chain(game)
        result = solve_ne_chain(game, game.random_strategy(rng), dec)
        if len(result.trace) > 3 * dec.v * dec.m**3 or not is_nash(game, result.strategy):
            problems.append(f"chain m={m}: {len(result.trace)} steps or not Nash")
        for it in result.iterations:
            iterations += 1
            if it.mu_after <= it.mu_before:
                decreases += 1
            if not check_grade_transition(it.before, it.j, it.after, it.scenario):
                transitions_bad += 1
    for name, (vector, (nbr_value, guard_value, prefix_len), measure) in grade_examples().items():
        if (nbr(vector), guard(vector), len(prefix(vector)), mu(vector)) != (nbr_value, guard_value, prefix_len, measure):
            problems.append(f"grade example {name} mismatch")
    first_row = PROGRESS_RUN[0][0].split()
    if mu(first_row) != (0, 0, 5, -5):
        problems.append(f"first progress row gives {mu(first_row)}")
    if decreases:
        problems.append(f"progress measure failed to increase in {decreases} of {iterations} iterations")
    if transitions_bad:
        problems.append(f"{transitions_bad} grade transitions outside the tables")
    elapsed = time.perf_counter() - start
    if elapsed >= 60:
        problems.append(f"took {elapsed:.1f}s")
    verdict(4, not problems, "; ".join(problems) or f"200 chains, {iterations} iterations, {elapsed:.1f}s")


def test_criterion_05_chain_strong(verdict):
    rng = random.Random(5)
    problems = []
    checked = 0
    start = time.perf_counter()
    for k in range(150):
        if k < 100:
            m = rng.randint(2, 3)
            lengths = [3] * m
        else:
            m = rng.randint(4, 6)
            lengths = (3, 5)
        game = random_chain_game(rng, m, lengths, rng.randint(1, 3))
        dec = detect_chain(game)
        result = solve_se_chain(game, game.random_strategy(rng), dec)
        if result.jumps > math.ceil(m / 2):
            problems.append(f"m={m}: {result.jumps} jumps")
        if len(result.trace) > 4 * dec.v * dec.m**4:
            problems.append(f"m={m}: {len(result.trace)} steps")
        if k < 100:
            checked += 1
            if not oracle.is_strong_brute(game, result.strategy):
                problems.append(f"m={m}: output not strong")
    elapsed = time.perf_counter() - start
    if elapsed >= 60:
        problems.append(f"took {elapsed:.1f}s")
    verdict(5, not problems, "; ".join(problems[:5]) or f"150 chains, {checked} oracle-checked, {elapsed:.1f}s")


def test_criterion_06_dag(verdict):
    rng = random.Random(6)
    problems = []
    over = 0
    worst = 0
    start = time.perf_counter()
    for _ in range(500):
        n = rng.randint(2, 8)
        game = random_dag_game(rng, n, rng.randint(1, 3))
        s, trace = solve_dag(game, game.random_strategy(rng))
        if not is_nash(game, s):
            problems.append("solve_dag output not Nash")
        worst = max(worst, len(trace) - (n - 1))
        if len(trace) > n - 1:
            over += 1
        sp = oracle.StrategySpace(game)
        for ne in oracle.enumerate_nash(game, space=sp):
            if not oracle.is_strong_brute(game, ne, space=sp):
                problems.append("Nash equilibrium of a DAG not strong")
        if sp.size <= 2000:
            order = topological_order(game)
            src, dst = oracle.improvement_edges(sp, "coalition")
            for a, b in zip(src.tolist(), dst.tolist()):
                if potential_vector(game, sp.strategy(b), order) <= potential_vector(game, sp.strategy(a), order):
                    problems.append("potential did not increase")
                    break
    if over:
        problems.append(f"{over} of 500 runs used more than n-1 deviations (at most {worst} extra)")
    elapsed = time.perf_counter() - start
    if elapsed >= 60:
        problems.append(f"took {elapsed:.1f}s")
    verdict(6, not problems, "; ".join(problems[:5]) or f"500 DAGs, {elapsed:.1f}s")


def _median_solve_time(game, reps=5):
    rng = random.Random(0)
    times = []
    for _ in range(reps):
        s0 = game.random_strategy(rng)
        start = time.perf_counter()
        solve_ne_two_colour(game, s0)
        times.append(time.perf_counter() - start)
    return statistics.median(times)


def test_criterion_07_two_colours(verdict):
    rng = random.Random(7)
    problems = []
    start = time.perf_counter()
    for _ in range(1000):
        n = rng.randint(2, 12)
        game = random_two_colour_game(rng, n)
        s, trace = solve_ne_two_colour(game, game.random_strategy(rng), audit=True)
        if len(trace) > 2 * n or not is_nash(game, s):
            problems.append(f"n={n}: {len(trace)} steps or not Nash")
    for _ in range(300):
        n = rng.randint(2, 10)
        game = random_two_colour_game(rng, n)
        s, trace = solve_se_two_colour(game, game.random_strategy(rng))
        if len(trace) > 2 * n or not oracle.is_strong_brute(game, s):
            problems.append(f"n={n}: strong run failed")
    elapsed = time.perf_counter() - start
    n = 2000
    small = _median_solve_time(sparse_two_colour_game(1, n, 20_000))
    large = _median_solve_time(sparse_two_colour_game(1, n, 40_000))
    ratio = large / small
    if ratio >= 4:
        problems.append(f"doubling |E| multiplied time by {ratio:.2f}")
    if elapsed >= 60:
        problems.append(f"took {elapsed:.1f}s")
    detail = f"1000 NE runs, 300 SE runs in {elapsed:.1f}s; |E| 20k->40k time ratio {ratio:.2f}"
    verdict(7, not problems, "; ".join(problems[:5]) or detail)


def _brute_max_coalition(game, s, colour):
    candidates = [i for i in game.nodes() if game.allows(i, colour) and s[i] != colour]
    union = set()
    for mask in range(1, 1 << len(candidates)):
        members = tuple(x for k, x in enumerate(candidates) if mask >> k & 1)
        s2 = s.replace({i: colour for i in members})
        if is_profitable_deviation(game, s, s2) == members:
            union |= set(members)
    return tuple(sorted(union))


def test_criterion_08_coalitions(verdict):
    rng = random.Random(8)
    problems = []
    for _ in range(500):
        n = rng.randint(2, 8)
        l = rng.randint(1, 3)
        game = random_game(rng, n, l, p=0.4)
        s = game.random_strategy(rng)
        c = rng.randrange(l)
        if max_profitable_coalition_to_colour(game, s, c) != _brute_max_coalition(game, s, c):
            problems.append("coalition differs from brute force")
    deviations = off_cycle = 0
    games = 0
    while games < 200:
        game = random_game(rng, rng.randint(3, 6), rng.randint(2, 3), p=0.6, min_set=2)
        sp = oracle.StrategySpace(game)
        nash = oracle.enumerate_nash(game, space=sp)
        if not nash:
            continue
        games += 1
        for ne in nash:
            for members, s2 in oracle.profitable_deviations(game, ne, space=sp):
                deviations += 1
                witness = unicolour_cycle_witness(game, ne, s2, members)
                if not witness.every_member_on_cycle:
                    off_cycle += 1
    if off_cycle:
        problems.append(
            f"{off_cycle} of {deviations} deviations have a member on no monochromatic cycle "
            "(each such member is fed by a path from one)"
        )
    verdict(8, not problems, "; ".join(problems[:5]) or f"500 coalitions exact, {deviations} deviations witnessed")


def test_criterion_09_reduction(verdict):
    problems = []
    start = time.perf_counter()
    corpus = cnf_corpus()
    sat_count = 0
    for formula in corpus:
        assignment = brute_sat(formula)
        game = reduce_cnf_to_game(formula)
        weighted = oracle.has_nash(game)
        flat = oracle.has_nash(eliminate_weights(game))
        if weighted != (assignment is not None) or flat != weighted:
            problems.append(f"{formula.to_ints()}: sat={assignment is not None} weighted={weighted} flat={flat}")
        if assignment is not None:
            sat_count += 1
            if not is_nash(game, complete_from_assignment(formula, assignment, game)):
                problems.append(f"{formula.to_ints()}: completion not Nash")
    elapsed = time.perf_counter() - start
    if elapsed >= 300:
        problems.append(f"took {elapsed:.1f}s")
    detail = f"{len(corpus)} formulas ({sat_count} satisfiable), {elapsed:.1f}s"
    verdict(9, not problems, "; ".join(problems[:5]) or detail)


def test_criterion_10_dynamics(verdict):
    problems = []
    rotation = oracle.analyze_dynamics(rotating_cycle(3))
    if rotation.has_fip or not rotation.weakly_acyclic:
        problems.append(f"rotation game: fip={rotation.has_fip} weakly_acyclic={rotation.weakly_acyclic}")
    inner = oracle.analyze_dynamics(bonus_triangle_no_ne())
    terminating = inner.states - len(inner.non_terminating_starts)
    if inner.sinks or terminating:
        problems.append(f"bonus triangle: {len(inner.sinks)} NE, {terminating} terminating starts")
    game, _ = unreachable_strong_game()
    for c in game.palette:
        if not oracle.is_strong_brute(game, game.strategy([c] * game.n)):
            problems.append(f"unicolour {c} not strong")
    verdict(10, not problems, "; ".join(problems) or "rotation not FIP but weakly acyclic; inner game stuck; 3 strong")


def _bonus_cycle(rng, n, l):
    sets = [sorted(rng.sample(range(l), rng.randint(1, l))) for _ in range(n)]
    bonuses = {(i, c): rng.randint(1, 3) for i in range(1, n + 1) for c in sets[i - 1] if rng.random() < 0.4}
    return CoordinationGame(n, sets, [(i, i % n + 1) for i in range(1, n + 1)], bonuses, "abc"[:l])


def test_criterion_11_cycle_k_equilibria(verdict):
    rng = random.Random(11)
    problems = []
    checked = 0
    for _ in range(300):
        n = rng.randint(3, 7)
        game = _bonus_cycle(rng, n, rng.randint(1, 3))
        sp = oracle.StrategySpace(game)
        for ne in oracle.enumerate_nash(game, space=sp):
            checked += 1
            if not oracle.k_equilibrium_brute(game, ne, n - 1, space=sp):
                problems.append(f"n={n}: Nash equilibrium with a coalition of size <= n-1")
    verdict(11, not problems, "; ".join(problems[:5]) or f"{checked} equilibria of 300 bonus cycles")
