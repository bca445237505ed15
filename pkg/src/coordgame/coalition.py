"""Coalitional deviations towards a single colour.

If a coalition can profitably deviate, so can the members that move to any
one colour on their own: the others only ever took colour away from them.
Together with the uniqueness of the maximal profitable coalition for a
colour, this makes "no colour admits a profitable coalition" an exact
strong-equilibrium test.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass

from .errors import GameError, InternalError
from .model import Coalition, CoordinationGame, JointStrategy, Verdict, payoff, payoffs, require_nash


def max_profitable_coalition_to_colour(game: CoordinationGame, s: JointStrategy, colour: int) -> Coalition:
    """Largest coalition that profitably switches to ``colour`` together.

    Starts from every node that can take ``colour`` but does not hold it
    and repeatedly drops the lowest-id member that would not strictly
    gain. The result does not depend on the removal order. Empty if no
    coalition exists.
    """
    if not 0 <= colour < game.l:
        raise GameError(f"colour id {colour} is not in the palette")
    game.check_strategy(s)
    current = payoffs(game, s)
    members = {i for i in game.nodes() if game.allows(i, colour) and s[i] != colour}
    prospect = {}
    for i in members:
        value = game.bonus(i, colour)
        for j, w in game.in_edges(i):
            if j in members or s[j] == colour:
                value += w
        prospect[i] = value
    heap = [i for i in members if prospect[i] <= current[i - 1]]
    heapq.heapify(heap)
    while heap:
        a = heapq.heappop(heap)
        if a not in members:
            continue
        members.discard(a)
        for b, w in game.out_edges(a):
            if b in members:
                before = prospect[b] > current[b - 1]
                prospect[b] -= w
                if before and prospect[b] <= current[b - 1]:
                    heapq.heappush(heap, b)
    return tuple(sorted(members))


def find_unicolour_deviation_from_ne(game: CoordinationGame, s: JointStrategy) -> tuple[Coalition, int] | None:
    """First colour (by id) with a profitable coalition, and that coalition."""
    require_nash(game, s)
    return find_unicolour_deviation(game, s)


def find_unicolour_deviation(game: CoordinationGame, s: JointStrategy) -> tuple[Coalition, int] | None:
    for c in range(game.l):
        members = max_profitable_coalition_to_colour(game, s, c)
        if members:
            return members, c
    return None


def is_strong_by_coalitions(game: CoordinationGame, s: JointStrategy) -> Verdict:
    """Exact strong-equilibrium test in time polynomial in the game size.

    The witness of a failure is ``(coalition, colour)``.
    """
    found = find_unicolour_deviation(game, s)
    if found is None:
        return Verdict(True)
    return Verdict(False, found, f"nodes {list(found[0])} gain by switching together")


@dataclass(frozen=True)
class MemberWitness:
    """How a coalition member is fed by same-coloured deviators.

    ``cycle`` is a monochromatic cycle of deviators through the member, if
    one exists. ``path`` always starts on such a cycle and ends at the
    member (a single node when the member lies on ``cycle``).
    """

    member: int
    cycle: tuple[int, ...] | None
    path: tuple[int, ...]


@dataclass(frozen=True)
class CycleWitness:
    members: dict[int, MemberWitness]

    @property
    def cycles(self) -> set[tuple[int, ...]]:
        return {w.cycle for w in self.members.values() if w.cycle is not None}

    @property
    def every_member_on_cycle(self) -> bool:
        return all(w.cycle is not None for w in self.members.values())

    def off_cycle(self) -> list[int]:
        return [i for i, w in self.members.items() if w.cycle is None]


def _canonical(cycle: list[int]) -> tuple[int, ...]:
    k = cycle.index(min(cycle))
    return tuple(cycle[k:] + cycle[:k])


def unicolour_cycle_witness(
    game: CoordinationGame, s: JointStrategy, s2: JointStrategy, members: Coalition | None = None
) -> CycleWitness:
    """Monochromatic cycles among the deviators of ``s -> s2``.

    ``s`` must be a Nash equilibrium and ``s -> s2`` profitable. Every
    member then has a deviating in-neighbour of its new colour, so some
    monochromatic cycle of deviators reaches it. A member need not lie on
    such a cycle itself; those members get ``cycle=None``. Raises
    InternalError if some member is not reached by any cycle.
    """
    require_nash(game, s)
    if members is None:
        members = s.differing(s2)
    inside = set(members)
    for i in members:
        if payoff(game, s2, i) <= payoff(game, s, i):
            raise GameError(f"node {i} does not gain, so this is not a profitable deviation")
    feeders = {i: [j for j, _ in game.in_edges(i) if j in inside and s2[j] == s2[i]] for i in members}
    succs = {i: [] for i in members}
    for i, preds in feeders.items():
        for j in preds:
            succs[j].append(i)

    out = {}
    for i in members:
        cycle = _cycle_through(i, succs)
        if cycle is not None:
            out[i] = MemberWitness(i, cycle, (i,))
            continue
        path = _path_from_cycle(i, feeders, succs)
        if path is None:
            raise InternalError(f"member {i} is not reached by a monochromatic cycle of deviators")
        out[i] = MemberWitness(i, None, path)
    return CycleWitness(out)


def _cycle_through(start: int, succs: dict[int, list[int]]) -> tuple[int, ...] | None:
    parent = {start: None}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for y in sorted(succs[x]):
            if y == start:
                cycle = [x]
                while parent[cycle[-1]] is not None:
                    cycle.append(parent[cycle[-1]])
                return _canonical(cycle[::-1])
            if y not in parent:
                parent[y] = x
                queue.append(y)
    return None


def _path_from_cycle(target: int, feeders: dict[int, list[int]], succs: dict[int, list[int]]) -> tuple[int, ...] | None:
    """Shortest backward walk from ``target`` to a node that lies on a cycle."""
    child = {target: None}
    queue = deque([target])
    while queue:
        x = queue.popleft()
        for y in sorted(feeders[x]):
            if y in child:
                continue
            child[y] = x
            if _cycle_through(y, succs) is not None:
                path = [y]
                while child[path[-1]] is not None:
                    path.append(child[path[-1]])
                return tuple(path)
            queue.append(y)
    return None
