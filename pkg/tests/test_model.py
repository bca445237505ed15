from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from coordgame.errors import GameError, PreconditionError
from coordgame.fixtures import rotating_cycle, three_colour_no_ne, weighted_triangle_no_ne
from coordgame.model import (
    CoordinationGame,
    ResponsePolicy,
    best_response,
    colour_values,
    holds_best_response,
    is_nash,
    is_profitable_deviation,
    payoff,
    payoffs,
    ppm_holds_sample,
    require_nash,
)
from coordgame.random_games import random_game

seeds = st.integers(0, 2**32 - 1)


def test_three_colour_payoffs():
    game, s = three_colour_no_ne()
    assert payoffs(game, s) == (0, 1, 2, 1, 1, 1, 0, 0, 0)


def test_three_colour_strategy_is_not_nash():
    game, s = three_colour_no_ne()
    verdict = is_nash(game, s)
    assert not verdict
    assert verdict.witness[0] == 1


def test_weighted_triangle_payoffs_at_aac():
    game = weighted_triangle_no_ne()
    s = game.strategy(["a", "a", "c"])
    # node 3's bonus is on b, so c earns nothing here
    assert payoffs(game, s) == (1, 2, 0)
    assert not is_nash(game, s)


def test_weighted_triangle_best_response_of_node_2():
    game = weighted_triangle_no_ne()
    s = game.strategy(["a", "a", "c"])
    assert best_response(game, s, 2) == (game.colour_id("a"), 2)
    assert colour_values(game, s, 2) == {game.colour_id("a"): 2, game.colour_id("c"): 1}


def test_singleton_set_best_response():
    game = CoordinationGame(2, [["a"], ["a", "b"]], [(2, 1)])
    s = game.strategy(["a", "b"])
    assert best_response(game, s, 1) == (0, 0)


def test_source_without_bonus_has_zero_payoff():
    game = CoordinationGame(2, [["a", "b"], ["a", "b"]], [(1, 2)])
    for s in (game.strategy(["a", "a"]), game.strategy(["b", "a"])):
        assert payoff(game, s, 1) == 0


def test_unweighted_triangle_best_response():
    game = rotating_cycle(3)
    s = game.strategy(["a", "a", "b"])
    assert best_response(game, s, 3) == (0, 1)


def test_rotation_step_is_profitable():
    game = rotating_cycle(4)
    s = game.strategy(["a", "b", "b", "b"])
    assert is_profitable_deviation(game, s, s.replace({2: 0})) == (2,)


def test_equal_strategies_are_not_a_deviation():
    game = rotating_cycle(3)
    s = game.strategy(["a", "b", "a"])
    assert is_profitable_deviation(game, s, s) is None


def test_full_swap_on_triangle():
    game = rotating_cycle(3)
    s = game.strategy(["a", "a", "b"])
    s2 = game.strategy(["b", "b", "a"])
    # node 2 keeps payoff 1 after the swap, so the swap is not profitable
    assert is_profitable_deviation(game, s, s2) is None


def test_unicolour_cycle_is_nash():
    game = rotating_cycle(5)
    assert is_nash(game, game.strategy(["b"] * 5))


def test_require_nash_raises():
    game, s = three_colour_no_ne()
    with pytest.raises(PreconditionError):
        require_nash(game, s)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(n=1, sets=[["a"]], edges=[]),
        dict(n=2, sets=[["a"], ["a"]], edges=[(1, 1)]),
        dict(n=2, sets=[["a"], ["a"]], edges=[(1, 2), (1, 2)]),
        dict(n=2, sets=[["a"], ["a"]], edges=[(1, 2, 0)]),
        dict(n=2, sets=[["a"], []], edges=[]),
        dict(n=2, sets=[["a"], ["a"]], edges=[(1, 3)]),
    ],
)
def test_invalid_games_are_rejected(kwargs):
    with pytest.raises(GameError):
        CoordinationGame(kwargs["n"], kwargs["sets"], kwargs["edges"])


def test_negative_bonus_rejected():
    with pytest.raises(GameError):
        CoordinationGame(2, [["a"], ["a"]], [], {(1, "a"): -1})


def test_strategy_outside_set_rejected():
    game = weighted_triangle_no_ne()
    with pytest.raises(GameError):
        game.strategy(["c", "a", "b"])


def test_ppm_check_has_teeth():
    game = CoordinationGame(2, [["a", "b"], ["a", "b"]], [(1, 2, -1)], validate=False)
    assert not ppm_holds_sample(game, 200, rng=0)


def test_prefer_predecessor_policy():
    game = CoordinationGame(3, [["a", "b"]] * 3, [(1, 2), (2, 3), (3, 1)], {(3, "a"): 1})
    s = game.strategy(["a", "b", "b"])
    colour, value = best_response(game, s, 3, ResponsePolicy.PREFER_PREDECESSOR)
    assert (colour, value) == (game.colour_id("b"), 1)
    assert best_response(game, s, 3)[0] == game.colour_id("a")


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_ppm_on_random_games(seed):
    game = random_game(seed, 6, 3)
    assert ppm_holds_sample(game, 100, rng=seed)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_best_response_dominates_current_colour(seed):
    game = random_game(seed, 6, 3)
    s = game.random_strategy(__import__("random").Random(seed))
    top_weight = max((sum(w for _, w in game.in_edges(i)) + game.max_bonus(i)) for i in game.nodes())
    for i in game.nodes():
        colour, value = best_response(game, s, i)
        assert value >= payoff(game, s, i)
        assert (value == payoff(game, s, i)) == holds_best_response(game, s, i)
        assert 0 <= payoff(game, s, i) <= top_weight
    assert bool(is_nash(game, s)) == all(holds_best_response(game, s, i) for i in game.nodes())
