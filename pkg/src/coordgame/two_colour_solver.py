"""Games whose palette has exactly two colours.

Colour id 0 is handled first ("blue"), then colour id 1 ("red"). In each
phase only switches to the phase colour are made, and no node switches
twice in a phase, so a Nash equilibrium is reached within ``2n`` steps.
Replacing single switches by maximal profitable coalitions gives a strong
equilibrium within ``2n`` coalition steps.
"""

from __future__ import annotations

from collections import deque

from .coalition import max_profitable_coalition_to_colour
from .dynamics import ImprovementTrace, TerminalStatus, TraceBuilder
from .errors import InternalError, PreconditionError
from .model import CoordinationGame, JointStrategy, payoff


def _require_two_colours(game: CoordinationGame) -> None:
    if game.l != 2:
        raise PreconditionError(f"palette must have exactly two colours, got {game.l}")


class TwoColourState:
    """Current strategy plus, per node, the payoff it would get for either colour.

    A switch by node ``a`` updates only its out-neighbours, so maintaining
    the values costs ``O(out-degree)`` per switch. With ``audit`` set,
    every switch is followed by a from-scratch comparison.
    """

    def __init__(self, game: CoordinationGame, s: JointStrategy, audit: bool = False):
        _require_two_colours(game)
        game.check_strategy(s)
        self.game = game
        self.colour = [0] + list(s.colours)
        self.audit = audit
        self.values = [[0] * (game.n + 1) for _ in range(2)]
        for i in game.nodes():
            for c in (0, 1):
                self.values[c][i] = game.bonus(i, c)
            for j, w in game.in_edges(i):
                self.values[self.colour[j]][i] += w

    @property
    def strategy(self) -> JointStrategy:
        return JointStrategy(tuple(self.colour[1:]))

    def pair(self, i: int) -> tuple[int, int]:
        """``(value if colour 0, value if colour 1)`` for node ``i``."""
        return self.values[0][i], self.values[1][i]

    def wants(self, i: int, c: int) -> bool:
        """Node ``i`` does not hold ``c``, may take it and would strictly gain."""
        return self.colour[i] != c and self.game.allows(i, c) and self.values[c][i] > self.values[1 - c][i]

    def switch(self, i: int, c: int) -> list[int]:
        """Move node ``i`` to ``c``; returns the out-neighbours whose values changed."""
        old = self.colour[i]
        self.colour[i] = c
        touched = []
        for j, w in self.game.out_edges(i):
            self.values[old][j] -= w
            self.values[c][j] += w
            touched.append(j)
        if self.audit:
            self.check()
        return touched

    def check(self) -> None:
        s = self.strategy
        for i in self.game.nodes():
            for c in (0, 1):
                expect = payoff(self.game, s.replace({i: c}), i) if self.game.allows(i, c) else None
                if expect is not None and self.values[c][i] != expect:
                    raise InternalError(f"node {i}: stored value {self.values[c][i]} for colour {c}, actual {expect}")


def solve_ne_two_colour(
    game: CoordinationGame, s0: JointStrategy | None = None, *, audit: bool = False
) -> tuple[JointStrategy, ImprovementTrace]:
    """Two phases of single switches, to colour 0 and then to colour 1."""
    _require_two_colours(game)
    if s0 is None:
        s0 = game.default_strategy()
    state = TwoColourState(game, s0, audit)
    builder = TraceBuilder(game, s0)
    for c in (0, 1):
        pending = deque(i for i in game.nodes() if state.wants(i, c))
        queued = set(pending)
        moved: set[int] = set()
        while pending:
            i = pending.popleft()
            queued.discard(i)
            if not state.wants(i, c):
                # a switch to c never lowers another node's gain from c
                raise InternalError(f"node {i} left the pending list within a phase")
            if i in moved:
                raise InternalError(f"node {i} switched twice in one phase")
            builder.switch(i, c)
            moved.add(i)
            for j in state.switch(i, c):
                if j not in queued and state.wants(j, c):
                    pending.append(j)
                    queued.add(j)
    if len(builder.trace) > 2 * game.n:
        raise InternalError(f"two-colour solver took {len(builder.trace)} steps, bound is {2 * game.n}")
    return builder.current, builder.finish(TerminalStatus.NASH, bound=2 * game.n)


def solve_se_two_colour(
    game: CoordinationGame, s0: JointStrategy | None = None
) -> tuple[JointStrategy, ImprovementTrace]:
    """Two phases of maximal profitable coalitions, to colour 0 and then to colour 1."""
    _require_two_colours(game)
    if s0 is None:
        s0 = game.default_strategy()
    builder = TraceBuilder(game, s0)
    for c in (0, 1):
        while members := max_profitable_coalition_to_colour(game, builder.current, c):
            builder.deviate({i: c for i in members})
            if len(builder.trace) > 2 * game.n:
                raise InternalError(f"two-colour strong solver exceeded {2 * game.n} coalition steps")
    return builder.current, builder.finish(TerminalStatus.STRONG, bound=2 * game.n)
