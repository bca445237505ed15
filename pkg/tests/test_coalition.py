from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from coordgame import oracle
from coordgame.coalition import (
    find_unicolour_deviation,
    find_unicolour_deviation_from_ne,
    is_strong_by_coalitions,
    max_profitable_coalition_to_colour,
    unicolour_cycle_witness,
)
from coordgame.errors import GameError, PreconditionError
from coordgame.fixtures import bidirectional_square, three_colour_no_ne, unreachable_strong_game
from coordgame.model import CoordinationGame, is_profitable_deviation
from coordgame.random_games import random_game

seeds = st.integers(0, 2**32 - 1)


def brute_max_coalition(game, s, colour):
    """Union of every coalition that gains by switching to ``colour``."""
    candidates = [i for i in game.nodes() if game.allows(i, colour) and s[i] != colour]
    union: set[int] = set()
    for size in range(1, len(candidates) + 1):
        for members in itertools.combinations(candidates, size):
            s2 = s.replace({i: colour for i in members})
            if is_profitable_deviation(game, s, s2) == members:
                union |= set(members)
    return tuple(sorted(union))


def off_cycle_example():
    # 1 <-> 2 feed each other; 3 is fed by 1 but lies on no cycle
    game = CoordinationGame(
        3,
        [["a", "b"], ["a", "b"], ["a", "c"]],
        [(1, 2), (2, 1), (1, 3, 2)],
        {(1, "a"): 1, (2, "a"): 1, (3, "c"): 1},
    )
    return game, game.strategy(["b", "b", "c"]), game.strategy(["a", "a", "a"])


def test_square_coalition():
    game, s = bidirectional_square()
    a = game.colour_id("a")
    assert max_profitable_coalition_to_colour(game, s, a) == (3, 4)
    assert find_unicolour_deviation_from_ne(game, s) == ((3, 4), a)
    verdict = is_strong_by_coalitions(game, s)
    assert not verdict and verdict.witness == ((3, 4), a)


def test_strong_unicolour_strategies():
    game, _ = unreachable_strong_game()
    for c in game.palette:
        assert is_strong_by_coalitions(game, game.strategy([c] * 12))


def test_unknown_colour_rejected():
    game, s = bidirectional_square()
    with pytest.raises(GameError):
        max_profitable_coalition_to_colour(game, s, 5)


def test_from_ne_requires_nash():
    game, s = three_colour_no_ne()
    with pytest.raises(PreconditionError):
        find_unicolour_deviation_from_ne(game, s)
    assert find_unicolour_deviation(game, s) is not None


def test_square_witness_is_a_cycle():
    game, s = bidirectional_square()
    s2 = s.replace({3: 0, 4: 0})
    witness = unicolour_cycle_witness(game, s, s2)
    assert witness.every_member_on_cycle
    assert witness.cycles == {(3, 4)}


def test_member_fed_from_a_cycle_without_lying_on_one():
    game, s, s2 = off_cycle_example()
    assert is_profitable_deviation(game, s, s2) == (1, 2, 3)
    witness = unicolour_cycle_witness(game, s, s2)
    assert not witness.every_member_on_cycle
    assert witness.off_cycle() == [3]
    assert witness.members[3].path == (1, 3)
    assert witness.cycles == {(1, 2)}


def test_witness_rejects_non_profitable_change():
    game, s = bidirectional_square()
    with pytest.raises(GameError):
        unicolour_cycle_witness(game, s, s.replace({1: 1}))


@settings(max_examples=150, deadline=None)
@given(seed=seeds, n=st.integers(2, 7), l=st.integers(1, 3))
def test_matches_brute_force(seed, n, l):
    rng = random.Random(seed)
    game = random_game(rng, n, l, p=0.4)
    s = game.random_strategy(rng)
    colour = rng.randrange(l)
    assert max_profitable_coalition_to_colour(game, s, colour) == brute_max_coalition(game, s, colour)


@settings(max_examples=80, deadline=None)
@given(seed=seeds, n=st.integers(2, 5), l=st.integers(1, 3))
def test_exact_strong_test(seed, n, l):
    game = random_game(seed, n, l, p=0.5)
    sp = oracle.StrategySpace(game)
    for ne in oracle.enumerate_nash(game, space=sp):
        assert bool(is_strong_by_coalitions(game, ne)) == bool(oracle.is_strong_brute(game, ne, space=sp))


@settings(max_examples=60, deadline=None)
@given(seed=seeds, n=st.integers(2, 5), l=st.integers(1, 3))
def test_every_deviation_from_nash_is_fed_by_a_cycle(seed, n, l):
    game = random_game(seed, n, l, p=0.5)
    sp = oracle.StrategySpace(game)
    for ne in oracle.enumerate_nash(game, space=sp):
        for members, s2 in oracle.profitable_deviations(game, ne, space=sp):
            witness = unicolour_cycle_witness(game, ne, s2)
            assert set(witness.members) == set(members)
            for w in witness.members.values():
                assert w.path[-1] == w.member
