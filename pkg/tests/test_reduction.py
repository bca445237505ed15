from __future__ import annotations

import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coordgame import oracle
from coordgame.errors import GameError, PreconditionError
from coordgame.fixtures import three_colour_no_ne, weighted_triangle_no_ne
from coordgame.model import CoordinationGame, is_nash, payoff
from coordgame.random_games import random_game
from coordgame.reduction import (
    GADGET_ROLES,
    PORT_WEIGHT,
    CnfFormula,
    brute_sat,
    build_gadget,
    cnf_corpus,
    complete_from_assignment,
    eliminate_weights,
    emit_dimacs,
    export_polymatrix,
    extract_assignment,
    gadget_nodes,
    lift_to_relays,
    parse_dimacs,
    project_from_relays,
    random_cnf,
    reduce_cnf_to_game,
)

seeds = st.integers(0, 2**32 - 1)


@pytest.mark.parametrize("params", list(itertools.product([True, False], repeat=3)))
def test_gadget_has_no_nash(params):
    assert oracle.enumerate_nash(build_gadget(*params)) == []


def test_gadget_loses_its_property_without_a_source_edge():
    gadget = build_gadget(True, True, True)
    edges = [e for e in gadget.edges if e[:2] != (4, 1)]
    mutant = CoordinationGame(9, [gadget.colours(i) for i in gadget.nodes()], edges, palette=gadget.palette)
    assert oracle.enumerate_nash(mutant) != []


def test_gadget_parameter_must_be_truth_colour():
    with pytest.raises(GameError):
        build_gadget("red", True, True)


def test_dimacs_round_trip():
    text = "c sample\np cnf 3 2\n1 -2 3 0\n-1 2 2 0\n"
    formula = parse_dimacs(text)
    assert formula.to_ints() == [[1, -2, 3], [-1, 2, 2]]
    assert parse_dimacs(emit_dimacs(formula)) == formula


@pytest.mark.parametrize(
    "text",
    ["1 2 3 0\n", "p cnf 2 1\n1 2 0\n", "p cnf 3 2\n1 2 3 0\n", "p cnf 3 1\n1 x 3 0\n", "p cnf 2 1\n1 2 3 0\n"],
)
def test_bad_dimacs(text):
    with pytest.raises(GameError):
        parse_dimacs(text)


def test_layout_of_reduced_game():
    formula = CnfFormula.from_ints(2, [[1, -2, 2]])
    game = reduce_cnf_to_game(formula)
    assert game.n == 2 + 9
    ids = gadget_nodes(formula, 1)
    assert list(ids) == list(GADGET_ROLES) and ids["A"] == 3
    assert game.weight(1, ids["A"]) == PORT_WEIGHT
    assert game.weight(2, ids["B"]) == PORT_WEIGHT
    assert game.colours(ids["B"]) == (game.colour_id("red"), game.colour_id("blue"), game.colour_id("false"))
    assert not game.has_bonuses


def test_weight_elimination_counts():
    game = CoordinationGame(2, [["a"], ["a"]], [(1, 2, PORT_WEIGHT)])
    flat = eliminate_weights(game)
    assert flat.n == 2 + PORT_WEIGHT
    assert len(flat.edges) == 2 * PORT_WEIGHT
    assert flat.is_unweighted


def test_unit_edges_get_one_relay_unless_preserved():
    game = CoordinationGame(2, [["a"], ["a"]], [(1, 2)])
    assert eliminate_weights(game).n == 3
    assert eliminate_weights(game, preserve_unit_edges=True).n == 2


@pytest.mark.parametrize("make", [weighted_triangle_no_ne, lambda: three_colour_no_ne()[0]])
def test_elimination_keeps_games_without_nash(make):
    assert oracle.enumerate_nash(eliminate_weights(make())) == []


@settings(max_examples=50, deadline=None)
@given(seed=seeds, n=st.integers(2, 4))
def test_elimination_maps_nash_both_ways(seed, n):
    game = random_game(seed, n, 2, p=0.5, max_weight=2, bonus_prob=0.0)
    flat = eliminate_weights(game)
    weighted = oracle.enumerate_nash(game)
    for ne in weighted:
        assert is_nash(flat, lift_to_relays(game.n, flat, ne))
    projected = {project_from_relays(game.n, s) for s in oracle.enumerate_nash(flat, search_budget=10**6)}
    assert projected == set(weighted)


def test_single_clause_completion():
    formula = CnfFormula.from_ints(3, [[1, 2, -3]])
    assignment = {1: False, 2: False, 3: False}
    game = reduce_cnf_to_game(formula)
    s = complete_from_assignment(formula, assignment, game)
    assert is_nash(game, s)
    assert extract_assignment(formula, game, s) == assignment


def test_completion_needs_a_satisfying_assignment():
    formula = CnfFormula.from_ints(1, [[1, 1, 1]])
    with pytest.raises(PreconditionError):
        complete_from_assignment(formula, {1: False})


def test_extract_needs_nash():
    formula = CnfFormula.from_ints(1, [[1, 1, 1]])
    game = reduce_cnf_to_game(formula)
    with pytest.raises(PreconditionError):
        extract_assignment(formula, game, game.default_strategy())


def test_unsat_formula_gives_game_without_nash():
    formula = CnfFormula.from_ints(1, [[1, 1, 1], [-1, -1, -1]])
    assert brute_sat(formula) is None
    assert not oracle.has_nash(reduce_cnf_to_game(formula))


def test_corpus_shape():
    corpus = cnf_corpus()
    assert len(corpus) == 120
    assert all(f.n <= 4 and len(f.clauses) <= 3 for f in corpus)
    assert any(brute_sat(f) is None for f in corpus)


@settings(max_examples=25, deadline=None)
@given(seed=seeds, n=st.integers(1, 3), clauses=st.integers(1, 2))
def test_reduction_tracks_satisfiability(seed, n, clauses):
    formula = random_cnf(seed, n, clauses)
    game = reduce_cnf_to_game(formula)
    assignment = brute_sat(formula)
    assert oracle.has_nash(game) == (assignment is not None)
    if assignment is not None:
        ne = complete_from_assignment(formula, assignment, game)
        assert formula.satisfied_by(extract_assignment(formula, game, ne))


def test_polymatrix_of_edgeless_game():
    game = CoordinationGame(3, [["a", "b"]] * 3, [])
    view = export_polymatrix(game)
    assert view.tables == {}
    assert not view.table(1, 2).any()


def test_polymatrix_of_unweighted_game():
    game, s = three_colour_no_ne()
    view = export_polymatrix(game)
    for (i, j), table in view.tables.items():
        assert (j, i, 1) in game.edges
        assert np.array_equal(table, np.eye(game.l, dtype=np.int64))


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_polymatrix_reproduces_payoffs(seed):
    rng = random.Random(seed)
    game = random_game(rng, 6, 3)
    view = export_polymatrix(game)
    s = game.random_strategy(rng)
    assert all(view.payoff(s, i) == payoff(game, s, i) for i in game.nodes())
