"""Coordination games on weighted directed graphs.

A game is a weighted digraph on nodes ``1..n``, a non-empty colour set per
node and a non-negative bonus for each (node, colour) pair. The payoff of a
node is the total weight of in-edges from neighbours that picked the same
colour, plus the bonus of its own colour.

Colours are interned to dense ids ``0..l-1`` ordered like the palette, and
all algorithms work on ids. Names only matter for input and output.
"""

from __future__ import annotations

import random
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass
from enum import Enum
from typing import Any, Union

from .errors import GameError, PreconditionError

ColourLike = Union[int, str]
Coalition = tuple[int, ...]


class ResponsePolicy(str, Enum):
    """Tie-breaking rule used when a node picks among several best responses."""

    LOWEST_ID = "lowest-id"
    PREFER_MB = "prefer-mb"
    PREFER_PREDECESSOR = "prefer-predecessor"


@dataclass(frozen=True)
class Verdict:
    """Boolean outcome that can carry a witness and a short reason."""

    ok: bool
    witness: Any = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class JointStrategy:
    """One colour id per node. Indexing is by node id, starting at 1."""

    colours: tuple[int, ...]

    def __getitem__(self, node: int) -> int:
        if node < 1:
            raise IndexError(f"node ids start at 1, got {node}")
        return self.colours[node - 1]

    def __len__(self) -> int:
        return len(self.colours)

    def __iter__(self) -> Iterator[int]:
        return iter(self.colours)

    def replace(self, updates: Mapping[int, int]) -> JointStrategy:
        colours = list(self.colours)
        for node, colour in updates.items():
            colours[node - 1] = colour
        return JointStrategy(tuple(colours))

    def differing(self, other: JointStrategy) -> Coalition:
        return tuple(i + 1 for i, (a, b) in enumerate(zip(self.colours, other.colours)) if a != b)

    def names(self, game: CoordinationGame) -> tuple[str, ...]:
        return tuple(game.palette[c] for c in self.colours)

    @classmethod
    def unicolour(cls, n: int, colour: int) -> JointStrategy:
        return cls((colour,) * n)


class CoordinationGame:
    """Immutable coordination game.

    Args:
        n: number of nodes, at least 2.
        sets: colour set per node, either a mapping ``node -> colours`` or a
            sequence in node order. Colours are palette names or ids.
        edges: ``(u, v)`` or ``(u, v, weight)`` triples; weight defaults to 1.
        bonuses: mapping ``(node, colour) -> value`` or ``(node, colour, value)``
            triples. Missing pairs have bonus 0.
        palette: ordered colour names. Defaults to the sorted union of names
            used in ``sets``.
        validate: set to False only to build deliberately invalid games in
            self-check harnesses.
    """

    def __init__(
        self,
        n: int,
        sets: Mapping[int, Iterable[ColourLike]] | Sequence[Iterable[ColourLike]],
        edges: Iterable[Sequence[int]] = (),
        bonuses: Mapping[tuple[int, ColourLike], int] | Iterable[Sequence[Any]] | None = None,
        palette: Sequence[str] | None = None,
        *,
        validate: bool = True,
    ):
        if not isinstance(n, int) or n < 2:
            raise GameError(f"a game needs n > 1 nodes, got {n!r}")
        self.n = n

        if isinstance(sets, Mapping):
            raw_sets = {int(k): list(v) for k, v in sets.items()}
            missing = [i for i in range(1, n + 1) if i not in raw_sets]
            if missing:
                raise GameError(f"sets: no colour set for nodes {missing}")
            extra = sorted(k for k in raw_sets if not 1 <= k <= n)
            if extra:
                raise GameError(f"sets: unknown nodes {extra}")
        else:
            seq = list(sets)
            if len(seq) != n:
                raise GameError(f"sets: expected {n} colour sets, got {len(seq)}")
            raw_sets = {i + 1: list(v) for i, v in enumerate(seq)}

        if palette is None:
            names = {c for v in raw_sets.values() for c in v if isinstance(c, str)}
            palette = sorted(names)
        self.palette: tuple[str, ...] = tuple(str(c) for c in palette)
        if len(set(self.palette)) != len(self.palette):
            raise GameError("palette: colour names must be distinct")
        if not self.palette:
            raise GameError("palette: at least one colour is required")
        self._ids = {name: k for k, name in enumerate(self.palette)}

        # index 0 is a dummy slot so that per-node tables use node ids directly
        self._sets: list[tuple[int, ...]] = [()]
        self._masks: list[int] = [0]
        for i in range(1, n + 1):
            ids = sorted({self.colour_id(c, context=f"sets[{i}]") for c in raw_sets[i]})
            if not ids:
                raise GameError(f"sets[{i}]: colour set must be non-empty")
            self._sets.append(tuple(ids))
            mask = 0
            for c in ids:
                mask |= 1 << c
            self._masks.append(mask)

        weights: dict[tuple[int, int], int] = {}
        for k, e in enumerate(edges):
            if len(e) == 2:
                u, v, w = int(e[0]), int(e[1]), 1
            elif len(e) == 3:
                u, v, w = int(e[0]), int(e[1]), int(e[2])
            else:
                raise GameError(f"edges[{k}]: expected (u, v) or (u, v, weight)")
            if not (1 <= u <= n and 1 <= v <= n):
                raise GameError(f"edges[{k}]: node ids must lie in 1..{n}")
            if u == v:
                raise GameError(f"edges[{k}]: self-loop at node {u}")
            if (u, v) in weights:
                raise GameError(f"edges[{k}]: parallel edge {u}->{v}")
            if validate and w < 1:
                raise GameError(f"edges[{k}]: weight must be a positive integer, got {w}")
            weights[(u, v)] = w
        self._weights = weights
        self.edges: tuple[tuple[int, int, int], ...] = tuple(
            (u, v, w) for (u, v), w in sorted(weights.items())
        )
        ins: list[list[tuple[int, int]]] = [[] for _ in range(n + 1)]
        outs: list[list[tuple[int, int]]] = [[] for _ in range(n + 1)]
        for u, v, w in self.edges:
            ins[v].append((u, w))
            outs[u].append((v, w))
        self._in: list[tuple[tuple[int, int], ...]] = [tuple(x) for x in ins]
        self._out: list[tuple[tuple[int, int], ...]] = [tuple(x) for x in outs]

        self._bonus: list[dict[int, int]] = [{} for _ in range(n + 1)]
        if bonuses is not None:
            items = (
                [(k[0], k[1], v) for k, v in bonuses.items()]
                if isinstance(bonuses, Mapping)
                else [tuple(b) for b in bonuses]
            )
            for k, item in enumerate(items):
                if len(item) != 3:
                    raise GameError(f"bonuses[{k}]: expected (node, colour, value)")
                node, colour, value = int(item[0]), item[1], int(item[2])
                if not 1 <= node <= n:
                    raise GameError(f"bonuses[{k}]: node ids must lie in 1..{n}")
                if value < 0:
                    raise GameError(f"bonuses[{k}]: bonus must be non-negative, got {value}")
                c = self.colour_id(colour, context=f"bonuses[{k}]")
                if value:
                    self._bonus[node][c] = value
                else:
                    self._bonus[node].pop(c, None)

        self._mb: list[tuple[int, ...]] = [()]
        self._max_bonus: list[int] = [0]
        for i in range(1, n + 1):
            values = [self._bonus[i].get(c, 0) for c in self._sets[i]]
            top = max(values)
            self._max_bonus.append(top)
            self._mb.append(tuple(c for c, b in zip(self._sets[i], values) if b == top))

    # colours ---------------------------------------------------------------

    @property
    def l(self) -> int:  # noqa: E743 - matches the usual name for the palette size
        return len(self.palette)

    def colour_id(self, colour: ColourLike, context: str = "colour") -> int:
        if isinstance(colour, str):
            try:
                return self._ids[colour]
            except KeyError:
                raise GameError(f"{context}: unknown colour {colour!r}") from None
        c = int(colour)
        if not 0 <= c < len(self.palette):
            raise GameError(f"{context}: colour id {c} outside 0..{len(self.palette) - 1}")
        return c

    def colour_name(self, c: int) -> str:
        return self.palette[c]

    def colours(self, i: int) -> tuple[int, ...]:
        return self._sets[self._node(i)]

    def allows(self, i: int, c: int) -> bool:
        return bool(self._masks[i] >> c & 1)

    def mask(self, i: int) -> int:
        return self._masks[i]

    # graph -----------------------------------------------------------------

    def nodes(self) -> range:
        return range(1, self.n + 1)

    def in_edges(self, i: int) -> tuple[tuple[int, int], ...]:
        return self._in[self._node(i)]

    def out_edges(self, i: int) -> tuple[tuple[int, int], ...]:
        return self._out[self._node(i)]

    def weight(self, u: int, v: int) -> int:
        return self._weights.get((u, v), 0)

    def nontrivial_edges(self) -> tuple[tuple[int, int, int], ...]:
        return tuple(e for e in self.edges if e[2] != 1)

    @property
    def is_unweighted(self) -> bool:
        return all(w == 1 for _, _, w in self.edges)

    # bonuses ---------------------------------------------------------------

    def bonus(self, i: int, c: int) -> int:
        return self._bonus[i].get(c, 0)

    def bonus_items(self) -> tuple[tuple[int, int, int], ...]:
        return tuple(
            (i, c, v) for i in range(1, self.n + 1) for c, v in sorted(self._bonus[i].items())
        )

    def max_bonus(self, i: int) -> int:
        return self._max_bonus[i]

    def mb(self, i: int) -> tuple[int, ...]:
        """Colours of node ``i`` with maximal bonus."""
        return self._mb[i]

    def bonus_nodes(self) -> tuple[int, ...]:
        """Nodes with a non-zero bonus on at least one colour of their own set."""
        return tuple(i for i in self.nodes() if self._max_bonus[i] > 0)

    @property
    def has_bonuses(self) -> bool:
        return any(self._max_bonus[i] > 0 for i in self.nodes())

    # strategies ------------------------------------------------------------

    def strategy(self, colours: Iterable[ColourLike]) -> JointStrategy:
        ids = tuple(self.colour_id(c, context="strategy") for c in colours)
        s = JointStrategy(ids)
        self.check_strategy(s)
        return s

    def check_strategy(self, s: JointStrategy) -> None:
        if len(s.colours) != self.n:
            raise GameError(f"strategy: expected {self.n} colours, got {len(s.colours)}")
        for i, c in enumerate(s.colours, start=1):
            if not (0 <= c < len(self.palette)) or not self.allows(i, c):
                raise GameError(f"strategy: node {i} cannot choose colour {c!r}")

    def default_strategy(self) -> JointStrategy:
        """Lowest-id colour for every node."""
        return JointStrategy(tuple(self._sets[i][0] for i in self.nodes()))

    def random_strategy(self, rng: random.Random) -> JointStrategy:
        return JointStrategy(tuple(rng.choice(self._sets[i]) for i in self.nodes()))

    def strategy_count(self) -> int:
        total = 1
        for i in self.nodes():
            total *= len(self._sets[i])
        return total

    # misc ------------------------------------------------------------------

    def _node(self, i: int) -> int:
        if not 1 <= i <= self.n:
            raise GameError(f"node id {i} outside 1..{self.n}")
        return i

    def _key(self) -> tuple:
        return (self.n, self.palette, tuple(self._sets), self.edges, self.bonus_items())

    def __eq__(self, other: object) -> bool:
        return isinstance(other, CoordinationGame) and self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        return (
            f"CoordinationGame(n={self.n}, l={self.l}, edges={len(self.edges)}, "
            f"bonus_nodes={len(self.bonus_nodes())})"
        )


def payoff(game: CoordinationGame, s: JointStrategy, i: int) -> int:
    c = s[i]
    if not game.allows(game._node(i), c):
        raise GameError(f"node {i} cannot choose colour {c!r}")
    total = game.bonus(i, c)
    for j, w in game.in_edges(i):
        if s[j] == c:
            total += w
    return total


def payoffs(game: CoordinationGame, s: JointStrategy) -> tuple[int, ...]:
    return tuple(payoff(game, s, i) for i in game.nodes())


def colour_values(game: CoordinationGame, s: JointStrategy, i: int) -> dict[int, int]:
    """Payoff node ``i`` would get for each colour of its set, others fixed."""
    values = {c: game.bonus(i, c) for c in game.colours(i)}
    for j, w in game.in_edges(i):
        c = s[j]
        if c in values:
            values[c] += w
    return values


def default_predecessor(game: CoordinationGame, i: int) -> int | None:
    ins = game.in_edges(i)
    return ins[0][0] if len(ins) == 1 else None


def choose(
    game: CoordinationGame,
    s: JointStrategy,
    i: int,
    maximizers: Sequence[int],
    policy: ResponsePolicy,
    predecessor: int | None,
) -> int:
    """Pick one colour among ``maximizers`` (sorted ids) according to ``policy``."""
    if len(maximizers) == 1:
        return maximizers[0]
    pred_colour = s[predecessor] if predecessor is not None else None
    if policy is ResponsePolicy.LOWEST_ID:
        return maximizers[0]
    mb = set(game.mb(i))
    if policy is ResponsePolicy.PREFER_MB:
        pool = [c for c in maximizers if c in mb] or list(maximizers)
        return pred_colour if pred_colour in pool else pool[0]
    if pred_colour in maximizers:
        return pred_colour
    pool = [c for c in maximizers if c in mb] or list(maximizers)
    return pool[0]


def best_response(
    game: CoordinationGame,
    s: JointStrategy,
    i: int,
    policy: ResponsePolicy = ResponsePolicy.LOWEST_ID,
    predecessor: int | None = None,
) -> tuple[int, int]:
    """Return ``(colour, payoff)`` of a best response of node ``i`` to ``s``.

    ``predecessor`` names the node whose colour counts as the predecessor's
    colour for the ``prefer-*`` policies; by default it is the unique
    in-neighbour, if there is exactly one.
    """
    values = colour_values(game, s, i)
    top = max(values.values())
    maximizers = sorted(c for c, v in values.items() if v == top)
    if predecessor is None:
        predecessor = default_predecessor(game, i)
    return choose(game, s, i, maximizers, ResponsePolicy(policy), predecessor), top


def holds_best_response(game: CoordinationGame, s: JointStrategy, i: int) -> bool:
    values = colour_values(game, s, i)
    return values[s[i]] == max(values.values())


def is_profitable_deviation(
    game: CoordinationGame, s: JointStrategy, s2: JointStrategy
) -> Coalition | None:
    """Deviating set of ``s -> s2`` if every member strictly gains, else None."""
    members = s.differing(s2)
    if not members:
        return None
    for i in members:
        if payoff(game, s2, i) <= payoff(game, s, i):
            return None
    return members


def is_nash(
    game: CoordinationGame, s: JointStrategy, policy: ResponsePolicy = ResponsePolicy.LOWEST_ID
) -> Verdict:
    """Nash check. The witness is ``(node, better colour)`` for the lowest such node."""
    game.check_strategy(s)
    for i in game.nodes():
        values = colour_values(game, s, i)
        top = max(values.values())
        if values[s[i]] < top:
            colour, _ = best_response(game, s, i, policy)
            return Verdict(False, (i, colour), f"node {i} improves by switching")
    return Verdict(True)


def require_nash(game: CoordinationGame, s: JointStrategy) -> None:
    verdict = is_nash(game, s)
    if not verdict:
        raise PreconditionError(f"strategy is not a Nash equilibrium: {verdict.reason}")


def as_rng(rng: random.Random | int | None) -> random.Random:
    if isinstance(rng, random.Random):
        return rng
    return random.Random(rng)


def ppm_holds_sample(
    game: CoordinationGame, samples: int = 1000, rng: random.Random | int | None = None
) -> Verdict:
    """Sample ``(s, i, j)`` and check that ``j`` adopting ``s_i`` never hurts ``i``.

    Samples favour in-neighbours of ``i`` that can take the colour, since
    those are the only cases where the payoff can move.
    """
    rng = as_rng(rng)
    for _ in range(samples):
        s = game.random_strategy(rng)
        i = rng.randint(1, game.n)
        c = s[i]
        able = [j for j, _ in game.in_edges(i) if game.allows(j, c)]
        if able and rng.random() < 0.8:
            j = rng.choice(able)
        else:
            j = rng.choice([j for j in game.nodes() if j != i])
            if not game.allows(j, c):
                continue
        s2 = s.replace({j: c})
        if payoff(game, s2, i) < payoff(game, s, i):
            return Verdict(False, (s, i, j), f"node {j} adopting the colour of {i} hurt {i}")
    return Verdict(True)
