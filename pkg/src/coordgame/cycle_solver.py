"""Nash and strong equilibria on weighted simple cycles with bonuses.

Four cycle shapes are guaranteed to have short improvement paths under a
clockwise schedule with a suitable renaming of the nodes:

=========================  =================================  ==========
variant                    shape                              bound
=========================  =================================  ==========
``le1-bonus``              at most one node with bonuses       ``2n-1``
``le1-weight``             at most one edge of weight != 1     ``3n-1``
``2-bonus``                exactly two nodes with bonuses      ``3n``
``2-weight``               exactly two edges of weight != 1    ``4n-1``
=========================  =================================  ==========

When several shapes apply the one with the smallest bound wins.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

from .dynamics import ImprovementTrace, Step, TerminalStatus, TraceBuilder, round_robin, run_schedule
from .errors import GameError, InternalError, PreconditionError
from .model import CoordinationGame, JointStrategy, ResponsePolicy, Verdict, payoff, require_nash
from . import oracle

ADMISSIBLE_SCENARIOS = frozenset(
    {"o", "oi", "oo", "ooi", "i", "ii", "io", "ioi", "ioo", "iooi"}
)


class CycleVariant(str, Enum):
    LE1_BONUS = "le1-bonus"
    LE1_WEIGHT = "le1-weight"
    TWO_BONUS = "2-bonus"
    TWO_WEIGHT = "2-weight"
    UNSUPPORTED = "unsupported"

    def bound(self, n: int) -> int | None:
        return {
            CycleVariant.LE1_BONUS: 2 * n - 1,
            CycleVariant.LE1_WEIGHT: 3 * n - 1,
            CycleVariant.TWO_BONUS: 3 * n,
            CycleVariant.TWO_WEIGHT: 4 * n - 1,
        }.get(self)


@dataclass(frozen=True)
class CycleView:
    """A cycle game after renaming.

    ``ordering[k]`` is the node playing the role of node ``k + 1``; the
    schedule visits ``ordering`` round-robin. ``distinguished`` lists the
    renamed bonus nodes or weighted-edge targets whose updates form the
    update scenario.
    """

    ordering: tuple[int, ...]
    variant: CycleVariant
    distinguished: tuple[int, ...] = ()
    policies: dict[int, ResponsePolicy] = field(default_factory=dict)
    # first schedule slot after the opening phase; scenarios are recorded from here
    scenario_start: int | None = None

    @property
    def n(self) -> int:
        return len(self.ordering)

    @property
    def bound(self) -> int | None:
        return self.variant.bound(self.n)

    @property
    def pivot(self) -> int:
        return self.ordering[0]


class CycleResult(NamedTuple):
    strategy: JointStrategy
    trace: ImprovementTrace
    scenario: str | None


def cycle_order(game: CoordinationGame) -> tuple[int, ...]:
    """Nodes along the cycle starting at node 1; GameError if not a simple cycle."""
    for i in game.nodes():
        if len(game.in_edges(i)) != 1 or len(game.out_edges(i)) != 1:
            raise GameError(f"not a simple cycle: node {i} has in/out degree "
                            f"{len(game.in_edges(i))}/{len(game.out_edges(i))}")
    order = [1]
    while True:
        nxt = game.out_edges(order[-1])[0][0]
        if nxt == 1:
            break
        order.append(nxt)
    if len(order) != game.n:
        raise GameError(f"not a simple cycle: the cycle through node 1 has {len(order)} of {game.n} nodes")
    return tuple(order)


def is_simple_cycle(game: CoordinationGame) -> bool:
    try:
        cycle_order(game)
    except GameError:
        return False
    return True


def _rotate(order: tuple[int, ...], first: int) -> tuple[int, ...]:
    k = order.index(first)
    return order[k:] + order[:k]


def _successor(order: tuple[int, ...], node: int) -> int:
    return order[(order.index(node) + 1) % len(order)]


def natural_variant(game: CoordinationGame) -> CycleVariant:
    bonus_nodes = game.bonus_nodes()
    heavy = game.nontrivial_edges()
    if len(bonus_nodes) <= 1:
        return CycleVariant.LE1_BONUS
    if len(heavy) <= 1:
        return CycleVariant.LE1_WEIGHT
    if len(bonus_nodes) == 2:
        return CycleVariant.TWO_BONUS
    if len(heavy) == 2:
        return CycleVariant.TWO_WEIGHT
    return CycleVariant.UNSUPPORTED


def classify_cycle(
    game: CoordinationGame,
    variant: CycleVariant | str | None = None,
    *,
    last: int | None = None,
) -> CycleView:
    """Pick the variant and rename the nodes as its schedule requires.

    ``variant`` forces a specific (applicable) variant. ``last`` overrides
    which distinguished node is renamed to ``n`` for the ``2-weight``
    variant, or which bonus node becomes node 1 for ``2-bonus``.
    """
    order = cycle_order(game)
    bonus_nodes = game.bonus_nodes()
    heavy = game.nontrivial_edges()
    chosen = natural_variant(game) if variant is None else CycleVariant(variant)
    n = game.n
    lowest = ResponsePolicy.LOWEST_ID
    pred_first = ResponsePolicy.PREFER_PREDECESSOR
    mb_first = ResponsePolicy.PREFER_MB

    if chosen is CycleVariant.LE1_BONUS:
        if len(bonus_nodes) > 1:
            raise PreconditionError("le1-bonus variant needs at most one node with bonuses")
        if bonus_nodes:
            b = bonus_nodes[0]
            ordering = _rotate(order, _successor(order, b))
            return CycleView(ordering, chosen, (b,), {b: pred_first})
        return CycleView(order, chosen)

    if chosen is CycleVariant.LE1_WEIGHT:
        if len(heavy) > 1:
            raise PreconditionError("le1-weight variant needs at most one non-trivial weight")
        policies = {i: mb_first for i in game.nodes()}
        if heavy:
            t = heavy[0][1]
            policies[t] = pred_first
            return CycleView(_rotate(order, _successor(order, t)), chosen, (t,), policies)
        return CycleView(order, chosen, (), policies)

    if chosen is CycleVariant.TWO_BONUS:
        if len(bonus_nodes) != 2:
            raise PreconditionError("2-bonus variant needs exactly two nodes with bonuses")
        first = bonus_nodes[0] if last is None else last
        if first not in bonus_nodes:
            raise PreconditionError(f"node {first} has no bonuses")
        other = bonus_nodes[1] if first == bonus_nodes[0] else bonus_nodes[0]
        ordering = _rotate(order, first)
        policies = {first: pred_first, other: pred_first}
        return CycleView(ordering, chosen, (first, other), policies, scenario_start=n)

    if chosen is CycleVariant.TWO_WEIGHT:
        if len(heavy) != 2:
            raise PreconditionError("2-weight variant needs exactly two non-trivial weights")
        targets = sorted(e[1] for e in heavy)
        nth = targets[0] if last is None else last
        if nth not in targets:
            raise PreconditionError(f"node {nth} is not the target of a weighted edge")
        kth = targets[1] if nth == targets[0] else targets[0]
        ordering = _rotate(order, _successor(order, nth))
        policies = {i: mb_first for i in game.nodes()}
        policies[kth] = pred_first
        policies[nth] = pred_first
        return CycleView(ordering, chosen, (kth, nth), policies, scenario_start=2 * n - 1)

    return CycleView(order, CycleVariant.UNSUPPORTED)


def record_scenario(game: CoordinationGame, trace: ImprovementTrace, view: CycleView) -> str | None:
    """Inner/outer letters of the distinguished nodes' updates after the opening phase.

    A node that adopts its predecessor's colour records ``i`` (even if the
    colour also has maximal bonus); any other update records ``o``.
    """
    if view.scenario_start is None:
        return None
    letters = []
    s = trace.initial
    for step in trace.steps:
        i = step.deviators[0]
        if step.slot is not None and step.slot >= view.scenario_start and i in view.distinguished:
            pred = game.in_edges(i)[0][0]
            letters.append("i" if step.new_colours[0] == s[pred] else "o")
        s = s.replace(dict(zip(step.deviators, step.new_colours)))
    return "".join(letters) or None


def solve_ne_cycle(
    game: CoordinationGame,
    s0: JointStrategy | None = None,
    *,
    variant: CycleVariant | str | None = None,
    view: CycleView | None = None,
) -> CycleResult:
    """Run the clockwise schedule of the game's cycle variant to a Nash equilibrium.

    Raises PreconditionError for unsupported cycles and InternalError if
    the trace exceeds the variant's bound.
    """
    if view is None:
        view = classify_cycle(game, variant)
    if view.variant is CycleVariant.UNSUPPORTED:
        raise PreconditionError("cycle is outside every supported variant; no equilibrium is guaranteed")
    if s0 is None:
        s0 = game.default_strategy()
    bound = view.bound
    assert bound is not None
    trace = run_schedule(
        game,
        s0,
        round_robin(view.ordering),
        view.policies,
        cap=4 * game.n * bound,
    )
    if trace.status is not TerminalStatus.NASH:
        raise InternalError(f"{view.variant.value} schedule did not reach a Nash equilibrium ({trace.status.value})")
    if len(trace) > bound:
        raise InternalError(f"{view.variant.value} schedule took {len(trace)} steps, bound is {bound}")
    scenario = record_scenario(game, trace, view)
    trace.meta.update(variant=view.variant.value, bound=bound, ordering=view.ordering, scenario=scenario)
    return CycleResult(trace.final, trace, scenario)


def lift_to_strong(
    game: CoordinationGame, ne: JointStrategy, view: CycleView | None = None
) -> tuple[JointStrategy, Step | None]:
    """Turn a Nash equilibrium of a cycle game into a strong equilibrium.

    If some common colour makes the all-players switch profitable, switch
    to the one that maximizes the pivot's bonus; otherwise ``ne`` is
    already strong.
    """
    require_nash(game, ne)
    if view is None:
        view = classify_cycle(game)
    common = set(game.colours(1))
    for i in game.nodes():
        common &= set(game.colours(i))
    candidates = []
    for c in sorted(common):
        if all(ne[i] != c and game.weight(game.in_edges(i)[0][0], i) + game.bonus(i, c) > payoff(game, ne, i)
               for i in game.nodes()):
            candidates.append(c)
    if not candidates:
        return ne, None
    pivot = view.pivot
    best = max(candidates, key=lambda c: (game.bonus(pivot, c), -c))
    builder = TraceBuilder(game, ne)
    step = builder.deviate({i: best for i in game.nodes()})
    return builder.current, step


def solve_se_cycle(game: CoordinationGame, s0: JointStrategy | None = None) -> CycleResult:
    """Nash schedule followed by the lift; at most one extra (coalitional) step."""
    result = solve_ne_cycle(game, s0)
    strong, step = lift_to_strong(game, result.strategy)
    trace = result.trace
    if step is not None:
        trace.steps.append(step)
    trace.status = TerminalStatus.STRONG
    return CycleResult(strong, trace, result.scenario)


def check_k_equilibrium_property(game: CoordinationGame, ne: JointStrategy, cap: int = oracle.DEFAULT_CAP) -> Verdict:
    """Exhaustively confirm that ``ne`` resists every coalition of at most ``n-1`` players."""
    cycle_order(game)
    require_nash(game, ne)
    return oracle.k_equilibrium_brute(game, ne, game.n - 1, cap)
