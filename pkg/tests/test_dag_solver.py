from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from coordgame import oracle
from coordgame.dag_solver import is_dag, potential_vector, solve_dag, topological_order
from coordgame.dynamics import TerminalStatus, validate_trace
from coordgame.errors import GameError
from coordgame.fixtures import rotating_cycle
from coordgame.model import CoordinationGame, holds_best_response, is_nash
from coordgame.random_games import random_dag_game

seeds = st.integers(0, 2**32 - 1)


def test_topological_order_is_lowest_first():
    game = CoordinationGame(4, [["a"]] * 4, [(3, 1), (1, 2), (4, 2)])
    order = topological_order(game)
    assert order == (4, 3, 1, 2)
    pos = {x: k for k, x in enumerate(order)}
    assert all(pos[u] < pos[v] for u, v, _ in game.edges)


def test_cycle_is_not_a_dag():
    assert not is_dag(rotating_cycle(3))
    with pytest.raises(GameError):
        topological_order(rotating_cycle(3))


def test_excluding_a_node_breaks_the_cycle():
    assert set(topological_order(rotating_cycle(3), exclude=[2])) == {1, 3}


def test_path_follows_source_colour():
    game = CoordinationGame(3, [["b"], ["a", "b"], ["a", "b"]], [(1, 2), (2, 3)])
    s, trace = solve_dag(game, game.strategy(["b", "a", "a"]))
    assert s.names(game) == ("b", "b", "b")
    assert len(trace) == 2 and trace.status is TerminalStatus.STRONG


def test_source_moves_to_its_bonus():
    # every node may move once, sources included
    game = CoordinationGame(2, [["a", "b"]] * 2, [(1, 2)], {(1, "b"): 1})
    s, trace = solve_dag(game, game.strategy(["a", "a"]))
    assert s.names(game) == ("b", "b")
    assert len(trace) == game.n


def test_frozen_nodes_keep_colour():
    game = rotating_cycle(3)
    s0 = game.strategy(["b", "a", "a"])
    s, trace = solve_dag(game, s0, frozen=[1])
    assert s.names(game) == ("b", "b", "b")
    assert trace.status is TerminalStatus.STABLE


@settings(max_examples=80, deadline=None)
@given(seed=seeds, n=st.integers(2, 9), l=st.integers(1, 4))
def test_random_dag_one_pass(seed, n, l):
    game = random_dag_game(seed, n, l)
    s, trace = solve_dag(game, game.random_strategy(random.Random(seed)))
    assert is_nash(game, s)
    assert len(trace) <= n
    assert validate_trace(game, trace, strong_evidence=True)


@settings(max_examples=60, deadline=None)
@given(seed=seeds, n=st.integers(2, 9), l=st.integers(1, 4))
def test_without_bonuses_the_last_sink_never_moves_alone(seed, n, l):
    game = random_dag_game(seed, n, l, max_bonus=0)
    s, trace = solve_dag(game, game.random_strategy(random.Random(seed)))
    assert len(trace) <= n - 1


@settings(max_examples=40, deadline=None)
@given(seed=seeds, n=st.integers(2, 6), l=st.integers(1, 3))
def test_nash_of_dag_is_strong(seed, n, l):
    game = random_dag_game(seed, n, l)
    for ne in oracle.enumerate_nash(game):
        assert oracle.is_strong_brute(game, ne)


@settings(max_examples=30, deadline=None)
@given(seed=seeds, n=st.integers(2, 5), l=st.integers(1, 3))
def test_potential_increases_on_coalition_steps(seed, n, l):
    game = random_dag_game(seed, n, l)
    sp = oracle.StrategySpace(game)
    src, dst = oracle.improvement_edges(sp, "coalition")
    order = topological_order(game)
    for a, b in zip(src.tolist(), dst.tolist()):
        assert potential_vector(game, sp.strategy(b), order) > potential_vector(game, sp.strategy(a), order)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, n=st.integers(3, 8))
def test_frozen_solve_stabilises_the_rest(seed, n):
    rng = random.Random(seed)
    game = random_dag_game(rng, n, 3)
    frozen = rng.sample(range(1, n + 1), rng.randint(0, n - 1))
    s, _ = solve_dag(game, game.random_strategy(rng), frozen=frozen)
    assert all(holds_best_response(game, s, i) for i in game.nodes() if i not in frozen)
