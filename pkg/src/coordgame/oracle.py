"""Brute-force ground truth for small games.

Dense routines materialise the whole strategy space as a numpy matrix (one
row per joint strategy, node 1 most significant) and are capped by the
number of rows. ``search_nash`` is an exact backtracking enumeration of the
Nash equilibria for games too large to materialise, such as reduced 3-CNF
games; it prunes partial assignments only with necessary conditions, so it
never misses an equilibrium.
"""

from __future__ import annotations

import sys
from collections.abc import Iterator
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import breadth_first_order, connected_components

from .errors import CapExceeded, PreconditionError
from .model import CoordinationGame, JointStrategy, Verdict, payoffs

DEFAULT_CAP = 2_000_000
COALITION_CAP = 20_000
SEARCH_BUDGET = 5_000_000


class StrategySpace:
    """Mixed-radix enumeration of all joint strategies of a game."""

    def __init__(self, game: CoordinationGame, cap: int = DEFAULT_CAP):
        size = game.strategy_count()
        if size > cap:
            raise CapExceeded(
                f"strategy space has {size} joint strategies, cap is {cap}", needed=size, cap=cap
            )
        self.game = game
        self.size = size
        self.choices = [game.colours(i) for i in game.nodes()]
        radices = [len(c) for c in self.choices]
        strides = [1] * game.n
        for k in range(game.n - 2, -1, -1):
            strides[k] = strides[k + 1] * radices[k + 1]
        self.radices = np.array(radices, dtype=np.int64)
        self.strides = np.array(strides, dtype=np.int64)

    @cached_property
    def digits(self) -> np.ndarray:
        """Row ``r`` holds the position of each node's colour within its set."""
        idx = np.arange(self.size, dtype=np.int64)[:, None]
        return ((idx // self.strides) % self.radices).astype(np.int16)

    @cached_property
    def colours(self) -> np.ndarray:
        out = np.empty_like(self.digits)
        for k, choice in enumerate(self.choices):
            out[:, k] = np.asarray(choice, dtype=np.int16)[self.digits[:, k]]
        return out

    def value_of(self, i: int, c: int) -> np.ndarray:
        """Payoff of node ``i`` in every row if it played ``c`` instead."""
        S = self.colours
        total = np.full(self.size, self.game.bonus(i, c), dtype=np.int64)
        for j, w in self.game.in_edges(i):
            total += w * (S[:, j - 1] == c)
        return total

    @cached_property
    def payoffs(self) -> np.ndarray:
        S = self.colours
        P = np.zeros((self.size, self.game.n), dtype=np.int64)
        for i in self.game.nodes():
            col = S[:, i - 1]
            bonus = np.zeros(self.game.l, dtype=np.int64)
            for c in self.game.colours(i):
                bonus[c] = self.game.bonus(i, c)
            total = bonus[col]
            for j, w in self.game.in_edges(i):
                total = total + w * (S[:, j - 1] == col)
            P[:, i - 1] = total
        return P

    @cached_property
    def nash_mask(self) -> np.ndarray:
        P = self.payoffs
        ok = np.ones(self.size, dtype=bool)
        for i in self.game.nodes():
            for c in self.game.colours(i):
                ok &= P[:, i - 1] >= self.value_of(i, c)
        return ok

    def index_of(self, s: JointStrategy) -> int:
        pos = [self.choices[k].index(c) for k, c in enumerate(s.colours)]
        return int(np.dot(pos, self.strides))

    def strategy(self, row: int) -> JointStrategy:
        return JointStrategy(tuple(int(c) for c in self.colours[row]))


def _space(game: CoordinationGame, cap: int, space: StrategySpace | None) -> StrategySpace:
    if space is not None and space.game is game:
        return space
    return StrategySpace(game, cap)


def enumerate_nash(
    game: CoordinationGame,
    cap: int = DEFAULT_CAP,
    *,
    space: StrategySpace | None = None,
    search_budget: int | None = None,
) -> list[JointStrategy]:
    """All Nash equilibria in lexicographic order.

    Spaces within ``cap`` are scanned densely. Larger spaces fall back to
    :func:`search_nash` when ``search_budget`` is given, else CapExceeded.
    """
    if game.strategy_count() > cap and space is None:
        if search_budget is None:
            raise CapExceeded(
                f"strategy space has {game.strategy_count()} joint strategies, cap is {cap}",
                needed=game.strategy_count(),
                cap=cap,
            )
        return sorted(search_nash(game, budget=search_budget), key=lambda s: s.colours)
    sp = _space(game, cap, space)
    return [sp.strategy(int(r)) for r in np.flatnonzero(sp.nash_mask)]


def has_nash(game: CoordinationGame, cap: int = DEFAULT_CAP, budget: int = SEARCH_BUDGET) -> bool:
    """Exact NE existence: dense scan within ``cap``, otherwise backtracking search."""
    if game.strategy_count() <= cap:
        return bool(StrategySpace(game, cap).nash_mask.any())
    return next(search_nash(game, budget=budget), None) is not None


def profitable_deviations(
    game: CoordinationGame,
    s: JointStrategy,
    cap: int = DEFAULT_CAP,
    *,
    max_size: int | None = None,
    space: StrategySpace | None = None,
) -> list[tuple[tuple[int, ...], JointStrategy]]:
    """Every profitable deviation from ``s`` as ``(deviating set, new strategy)``."""
    sp = _space(game, cap, space)
    rows = _profitable_rows(sp, s, max_size)
    out = []
    for r in rows:
        s2 = sp.strategy(int(r))
        out.append((s.differing(s2), s2))
    return out


def _profitable_rows(sp: StrategySpace, s: JointStrategy, max_size: int | None) -> np.ndarray:
    S, P = sp.colours, sp.payoffs
    base = np.asarray(s.colours, dtype=S.dtype)
    mine = np.asarray(payoffs(sp.game, s), dtype=np.int64)
    diff = S != base
    ok = ((P > mine) | ~diff).all(axis=1)
    size = diff.sum(axis=1)
    ok &= size > 0
    if max_size is not None:
        ok &= size <= max_size
    return np.flatnonzero(ok)


def k_equilibrium_brute(
    game: CoordinationGame,
    s: JointStrategy,
    k: int,
    cap: int = DEFAULT_CAP,
    *,
    space: StrategySpace | None = None,
) -> Verdict:
    """No coalition of at most ``k`` players deviates profitably from ``s``.

    The witness of a failure is ``(deviating set, new strategy)`` for the
    lexicographically first profitable deviation.
    """
    game.check_strategy(s)
    if not 1 <= k <= game.n:
        raise PreconditionError(f"k must lie in 1..{game.n}, got {k}")
    sp = _space(game, cap, space)
    rows = _profitable_rows(sp, s, k)
    if len(rows):
        s2 = sp.strategy(int(rows[0]))
        return Verdict(False, (s.differing(s2), s2), "profitable deviation exists")
    return Verdict(True)


def is_strong_brute(
    game: CoordinationGame, s: JointStrategy, cap: int = DEFAULT_CAP, *, space: StrategySpace | None = None
) -> Verdict:
    return k_equilibrium_brute(game, s, game.n, cap, space=space)


@dataclass
class DynamicsReport:
    mode: str
    states: int
    edges: int
    sinks: list[JointStrategy]
    finite_property: bool  # FIP, or c-FIP in coalition mode
    weakly_acyclic: bool
    non_terminating_starts: list[JointStrategy] = field(default_factory=list)

    @property
    def has_fip(self) -> bool:
        return self.finite_property

    def summary(self) -> dict[str, object]:
        prefix = "c_" if self.mode == "coalition" else ""
        return {
            "mode": self.mode,
            "states": self.states,
            "edges": self.edges,
            "sinks": len(self.sinks),
            f"has_{prefix}fip": self.finite_property,
            f"{prefix}weakly_acyclic": self.weakly_acyclic,
            "non_terminating_starts": len(self.non_terminating_starts),
        }


def improvement_edges(sp: StrategySpace, mode: str = "single") -> tuple[np.ndarray, np.ndarray]:
    """Source and target rows of every profitable (single or coalitional) deviation."""
    game = sp.game
    if mode == "single":
        srcs, dsts = [], []
        P, D = sp.payoffs, sp.digits
        rows = np.arange(sp.size, dtype=np.int64)
        for i in game.nodes():
            for pos, c in enumerate(game.colours(i)):
                better = sp.value_of(i, c) > P[:, i - 1]
                better &= D[:, i - 1] != pos
                src = rows[better]
                shift = (pos - D[better, i - 1].astype(np.int64)) * sp.strides[i - 1]
                srcs.append(src)
                dsts.append(src + shift)
        if not srcs:
            return np.zeros(0, np.int64), np.zeros(0, np.int64)
        return np.concatenate(srcs), np.concatenate(dsts)
    if mode == "coalition":
        S, P = sp.colours, sp.payoffs
        srcs, dsts = [], []
        for r in range(sp.size):
            diff = S != S[r]
            ok = ((P > P[r]) | ~diff).all(axis=1) & diff.any(axis=1)
            hits = np.flatnonzero(ok)
            srcs.append(np.full(len(hits), r, dtype=np.int64))
            dsts.append(hits.astype(np.int64))
        return np.concatenate(srcs), np.concatenate(dsts)
    raise ValueError(f"mode must be 'single' or 'coalition', got {mode!r}")


def analyze_dynamics(game: CoordinationGame, mode: str = "single", cap: int | None = None) -> DynamicsReport:
    """Build the (c-)improvement graph and decide (c-)FIP and weak acyclicity.

    The graph is acyclic iff every strongly connected component is a single
    vertex (deviations never loop on a vertex). A start terminates iff it
    reaches a sink, found by a search from all sinks on reversed edges.
    """
    if cap is None:
        cap = DEFAULT_CAP if mode == "single" else COALITION_CAP
    sp = StrategySpace(game, cap)
    src, dst = improvement_edges(sp, mode)
    N = sp.size
    out_deg = np.bincount(src, minlength=N)
    sink_rows = np.flatnonzero(out_deg == 0)
    graph = coo_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(N, N)).tocsr()
    n_scc, _ = connected_components(graph, directed=True, connection="strong")
    acyclic = n_scc == N

    # reverse reachability from the sinks through a virtual root N
    rsrc = np.concatenate([dst, np.full(len(sink_rows), N, dtype=np.int64)])
    rdst = np.concatenate([src, sink_rows])
    rgraph = coo_matrix((np.ones(len(rsrc), dtype=np.int8), (rsrc, rdst)), shape=(N + 1, N + 1)).tocsr()
    reached = np.zeros(N + 1, dtype=bool)
    reached[breadth_first_order(rgraph, N, directed=True, return_predecessors=False)] = True
    stuck = np.flatnonzero(~reached[:N])
    return DynamicsReport(
        mode=mode,
        states=N,
        edges=len(src),
        sinks=[sp.strategy(int(r)) for r in sink_rows],
        finite_property=bool(acyclic),
        weakly_acyclic=len(stuck) == 0,
        non_terminating_starts=[sp.strategy(int(r)) for r in stuck],
    )


# exact backtracking search -------------------------------------------------


def search_order(game: CoordinationGame) -> list[int]:
    """Greedy order: next node has the most already-placed in-neighbours.

    Ties go to fewer colours, then lower id, so sources come before the
    nodes they feed and constraint checks fire early.
    """
    placed: set[int] = set()
    order = []
    score = {i: 0 for i in game.nodes()}
    while len(order) < game.n:
        best = min(
            (i for i in game.nodes() if i not in placed),
            key=lambda i: (-score[i], len(game.colours(i)), i),
        )
        order.append(best)
        placed.add(best)
        for j, _ in game.out_edges(best):
            score[j] += 1
    return order


def search_nash(game: CoordinationGame, budget: int = SEARCH_BUDGET) -> Iterator[JointStrategy]:
    """Yield every Nash equilibrium, each exactly once.

    A partial assignment is cut when some assigned node already has a
    colour that beats its own even if every unassigned in-neighbour later
    joined its colour. Once all in-neighbours are assigned this test is
    exactly the best-response test, so complete assignments that survive
    are Nash equilibria. ``budget`` bounds the number of tentative
    assignments; exceeding it raises CapExceeded.
    """
    n, l = game.n, game.l
    order = search_order(game)
    assign = [-1] * (n + 1)
    held = [[0] * l for _ in range(n + 1)]  # weight of assigned in-neighbours per colour
    free = [[0] * l for _ in range(n + 1)]  # weight of unassigned in-neighbours able to take a colour
    for i in game.nodes():
        for j, w in game.in_edges(i):
            for c in game.colours(j):
                free[i][c] += w
    bonus = [[game.bonus(i, c) if i else 0 for c in range(l)] for i in range(n + 1)]
    sets = [()] + [game.colours(i) for i in game.nodes()]
    outs = [()] + [game.out_edges(i) for i in game.nodes()]
    visits = 0

    def viable(y: int) -> bool:
        cy = assign[y]
        hy, by = held[y], bonus[y]
        ceiling = by[cy] + hy[cy] + free[y][cy]
        for c in sets[y]:
            if c != cy and by[c] + hy[c] > ceiling:
                return False
        return True

    def place(x: int, c: int, sign: int) -> None:
        for y, w in outs[x]:
            held[y][c] += sign * w
            fy = free[y]
            for c2 in sets[x]:
                fy[c2] -= sign * w

    def extend(depth: int) -> Iterator[JointStrategy]:
        nonlocal visits
        if depth == n:
            yield JointStrategy(tuple(assign[1:]))
            return
        x = order[depth]
        for c in sets[x]:
            visits += 1
            if visits > budget:
                raise CapExceeded(f"Nash search exceeded {budget} assignments", cap=budget)
            assign[x] = c
            place(x, c, +1)
            if viable(x) and all(assign[y] < 0 or viable(y) for y, _ in outs[x]):
                yield from extend(depth + 1)
            place(x, c, -1)
            assign[x] = -1

    limit = sys.getrecursionlimit()
    if limit < 4 * n + 100:
        sys.setrecursionlimit(4 * n + 100)
    yield from extend(0)
