"""Weighted acyclic games with bonuses.

Visiting the nodes once in topological order and moving each to a best
response yields a Nash equilibrium. In an acyclic game every Nash
equilibrium is also strong: a profitable coalition would need a cycle of
members that moved to a common colour.
"""

from __future__ import annotations

from collections.abc import Collection

from .dynamics import ImprovementTrace, TerminalStatus, TraceBuilder
from .errors import GameError
from .model import CoordinationGame, JointStrategy, best_response, holds_best_response, payoff


def topological_order(game: CoordinationGame, exclude: Collection[int] = ()) -> tuple[int, ...]:
    """Depth-first topological order; roots and successors are tried lowest id first.

    Nodes in ``exclude`` and their edges are ignored. Raises GameError
    naming a node on a cycle if the rest of the graph is not acyclic.
    """
    WHITE, GREY, BLACK = 0, 1, 2
    state = [WHITE] * (game.n + 1)
    for i in exclude:
        state[i] = BLACK
    finished: list[int] = []

    def successors(x: int):
        return iter(sorted(v for v, _ in game.out_edges(x)))

    for root in game.nodes():
        if state[root] != WHITE:
            continue
        state[root] = GREY
        stack = [(root, successors(root))]
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                state[node] = BLACK
                finished.append(node)
                stack.pop()
            elif state[nxt] == GREY:
                raise GameError(f"graph has a cycle through node {nxt}")
            elif state[nxt] == WHITE:
                state[nxt] = GREY
                stack.append((nxt, successors(nxt)))
    return tuple(reversed(finished))


def is_dag(game: CoordinationGame) -> bool:
    try:
        topological_order(game)
    except GameError:
        return False
    return True


def solve_dag(
    game: CoordinationGame,
    s0: JointStrategy | None = None,
    *,
    frozen: Collection[int] = (),
) -> tuple[JointStrategy, ImprovementTrace]:
    """One pass in topological order, each non-best-responding node switching.

    Nodes in ``frozen`` keep their colour and only the other nodes need to
    form an acyclic graph; every other node then ends on a best response.
    """
    order = topological_order(game, frozen)
    if s0 is None:
        s0 = game.default_strategy()
    builder = TraceBuilder(game, s0)
    skip = set(frozen)
    for slot, i in enumerate(order):
        if i in skip or holds_best_response(game, builder.current, i):
            continue
        colour, _ = best_response(game, builder.current, i)
        builder.switch(i, colour, slot)
    status = TerminalStatus.STRONG if not skip else TerminalStatus.STABLE
    trace = builder.finish(status, order=order)
    return builder.current, trace


def potential_vector(game: CoordinationGame, s: JointStrategy, order: tuple[int, ...] | None = None) -> tuple[int, ...]:
    """Payoffs listed in topological order.

    Every profitable (coalitional) deviation raises this vector
    lexicographically.
    """
    if order is None:
        order = topological_order(game)
    return tuple(payoff(game, s, i) for i in order)
