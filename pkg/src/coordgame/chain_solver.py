"""Open chains of cycles: detection, grades, the progress measure and solvers.

An open chain is a sequence of directed cycles ``C_1..C_m`` in which
consecutive cycles share exactly one node. Node ``[j, k]`` is the k-th node
of ``C_j``; ``[j, 1]`` is the up-link shared with ``C_{j+1}``, where it sits
at some position ``k`` (the down-link of ``C_{j+1}``). For the last cycle we
label so that its down-link is its last node.

The Nash solver repeatedly repairs the first cycle that contains a node
without a best response, treating the edge into a link node from the
neighbouring cycle as a unit bonus. Each repair moves the progress measure
``mu`` strictly up in lexicographic order.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import NamedTuple

from .dynamics import ImprovementTrace, TerminalStatus, TraceBuilder, round_robin, run_schedule
from .errors import InternalError, NotAChain, PreconditionError
from .model import CoordinationGame, JointStrategy, ResponsePolicy, Verdict, holds_best_response, payoffs

UPLUS, PLUS, UMINUS, MINUS, QUERY = "U+", "+", "U-", "-", "?"
GOOD = frozenset({UPLUS, PLUS})
BAD = frozenset({UMINUS, MINUS, QUERY})


@dataclass(frozen=True)
class ChainDecomposition:
    """``cycles[j - 1]`` lists ``[j, 1], ..., [j, v_j]``."""

    cycles: tuple[tuple[int, ...], ...]

    @property
    def m(self) -> int:
        return len(self.cycles)

    @property
    def v(self) -> int:
        return max(len(c) for c in self.cycles)

    @property
    def n(self) -> int:
        return sum(len(c) for c in self.cycles) - (self.m - 1)

    def cycle(self, j: int) -> tuple[int, ...]:
        return self.cycles[j - 1]

    def node(self, j: int, k: int) -> int:
        return self.cycles[j - 1][k - 1]

    def up_link(self, j: int) -> int | None:
        return self.cycles[j - 1][0] if j < self.m else None

    def down_link(self, j: int) -> int | None:
        return self.cycles[j - 2][0] if j > 1 else None

    def down_index(self, j: int) -> int | None:
        """Position ``k`` of the down-link in ``C_j``."""
        link = self.down_link(j)
        return None if link is None else self.cycles[j - 1].index(link) + 1

    def links(self) -> tuple[int, ...]:
        return tuple(c[0] for c in self.cycles[:-1])

    def labels(self, node: int) -> list[tuple[int, int]]:
        return [(j, k + 1) for j, c in enumerate(self.cycles, start=1) for k, x in enumerate(c) if x == node]

    def pred_in(self, j: int, node: int) -> int:
        cyc = self.cycles[j - 1]
        return cyc[cyc.index(node) - 1]


# detection ---------------------------------------------------------------


def detect_chain(game: CoordinationGame) -> ChainDecomposition:
    """Recognise an open chain of cycles in linear time.

    The nodes of in- and out-degree 2 are the links. Following the
    degree-1 nodes from each link leads to another link (or back to the
    same one); these walks must form a path of links with a loop at each
    end. Raises NotAChain with a reason otherwise.
    """
    n = game.n
    for u, v, _ in game.edges:
        if game.weight(v, u):
            raise NotAChain("bidirectional", f"edges {u}->{v} and {v}->{u} both exist")
    links = []
    for i in game.nodes():
        d_in, d_out = len(game.in_edges(i)), len(game.out_edges(i))
        if d_in != d_out or d_in not in (1, 2):
            raise NotAChain("degree", f"node {i} has in/out degree {d_in}/{d_out}")
        if d_in == 2:
            links.append(i)
    if not links:
        raise NotAChain("shape", "no node of degree 2, so at most a single cycle")
    is_link = set(links)

    walks: dict[int, list[tuple[int, list[int]]]] = {}
    for a in links:
        out = []
        for start, _ in game.out_edges(a):
            path = []
            x = start
            while x not in is_link:
                path.append(x)
                if len(path) > n:
                    raise NotAChain("shape", f"walk from link {a} never returns to a link")
                x = game.out_edges(x)[0][0]
            out.append((x, path))
        walks[a] = out

    loops = {a: [p for b, p in walks[a] if b == a] for a in links}
    targets = {a: [b for b, _ in walks[a] if b != a] for a in links}
    if len(links) == 1:
        a = links[0]
        if len(loops[a]) != 2:
            raise NotAChain("shape", f"single link {a} must close two cycles")
        first, second = sorted(loops[a], key=lambda p: p[0])
        cycles = [(a, *first), (*second, a)]
        return _checked(game, cycles)

    ends = [a for a in links if len(loops[a]) == 1]
    if len(ends) != 2 or any(len(loops[a]) > 1 for a in links):
        raise NotAChain("shape", "the links do not form a path with a closing cycle at each end")
    for a in links:
        for b in targets[a]:
            if a not in targets[b]:
                raise NotAChain("shape", f"link {a} reaches link {b} but not back")
    for a in links:
        expected = 1 if a in ends else 2
        if len(set(targets[a])) != expected:
            raise NotAChain("shape", f"link {a} must touch {expected} other link(s)")

    order = [min(ends)]
    while len(order) < len(links):
        nxt = [b for b in targets[order[-1]] if b not in order]
        if len(nxt) != 1:
            raise NotAChain("shape", "links do not form a simple path")
        order.append(nxt[0])

    path_to = {(a, b): p for a in links for b, p in walks[a]}
    cycles = [(order[0], *loops[order[0]][0])]
    for j in range(1, len(order)):
        up, down = order[j], order[j - 1]
        cycles.append((up, *path_to[(up, down)], down, *path_to[(down, up)]))
    last = order[-1]
    cycles.append((*loops[last][0], last))
    return _checked(game, cycles)


def _checked(game: CoordinationGame, cycles: list[tuple[int, ...]]) -> ChainDecomposition:
    dec = ChainDecomposition(tuple(tuple(c) for c in cycles))
    covered = [x for c in dec.cycles for x in c]
    if len(set(covered)) != game.n or dec.n != game.n:
        raise NotAChain("cover", "the cycles do not cover every node exactly once (links twice)")
    if sum(len(c) for c in dec.cycles) != len(game.edges):
        raise NotAChain("cover", "some edges lie outside the cycles")
    for c in dec.cycles:
        if len(c) < 3:
            raise NotAChain("shape", "every cycle needs at least 3 nodes")
    return dec


def is_open_chain(game: CoordinationGame) -> bool:
    try:
        detect_chain(game)
    except NotAChain:
        return False
    return True


# grades and the progress measure -----------------------------------------


def induced_bonus(dec: ChainDecomposition, s: JointStrategy, j: int) -> dict[int, tuple[int, int]]:
    """Unit bonuses seen by ``C_j``'s links: node -> (colour, 1).

    The colour is that of the link's predecessor in the neighbouring cycle.
    """
    out = {}
    up = dec.up_link(j)
    if up is not None:
        out[up] = (s[dec.pred_in(j + 1, up)], 1)
    down = dec.down_link(j)
    if down is not None:
        out[down] = (s[dec.pred_in(j - 1, down)], 1)
    return out


def non_best_responders(game: CoordinationGame, s: JointStrategy) -> frozenset[int]:
    return frozenset(i for i in game.nodes() if not holds_best_response(game, s, i))


def grade_of(dec: ChainDecomposition, s: JointStrategy, j: int, unstable: frozenset[int]) -> str:
    cyc = dec.cycle(j)
    same_ends = s[cyc[-1]] == s[cyc[0]]
    bad = [k for k, x in enumerate(cyc, start=1) if x in unstable]
    if not bad:
        return UPLUS if same_ends else PLUS
    if bad == [2]:
        return UMINUS if same_ends else MINUS
    return QUERY


def grades(game: CoordinationGame, dec: ChainDecomposition, s: JointStrategy) -> tuple[str, ...]:
    unstable = non_best_responders(game, s)
    return tuple(grade_of(dec, s, j, unstable) for j in range(1, dec.m + 1))


def nbr(grade_vector: Sequence[str]) -> int | None:
    """Index of the first cycle with a node that is not best-responding."""
    for j, g in enumerate(grade_vector, start=1):
        if g not in GOOD:
            return j
    return None


def guard(grade_vector: Sequence[str]) -> int:
    best = 0
    for j, g in enumerate(grade_vector, start=1):
        if g == UPLUS:
            best = j
        elif g != PLUS:
            break
    return best


def prefix(grade_vector: Sequence[str]) -> tuple[str, ...]:
    out = []
    seen_bad = False
    for g in grade_vector:
        if g in BAD:
            if seen_bad:
                break
            seen_bad = True
        out.append(g)
        if g == QUERY:
            break
    return tuple(out)


def mu(grade_vector: Sequence[str]) -> tuple[int, int, int, int]:
    m = len(grade_vector)
    j = nbr(grade_vector)
    if j is None:
        return (m + 1, 0, 0, 0)
    pre = prefix(grade_vector)
    flagged = UMINUS in pre
    if not flagged and MINUS in pre:
        flagged = UPLUS in pre[pre.index(MINUS) + 1:]
    if flagged:
        return (guard(grade_vector), 1, 0, -j)
    return (guard(grade_vector), 0, len(pre), -j)


def mu_value_count(m: int) -> int:
    """Number of distinct values the progress measure can take for ``m`` cycles."""
    count = 1  # Nash equilibria
    for g in range(0, m):
        # flag 1: NBR lies after the guard
        count += m - g
        # flag 0: prefix length p > g and NBR between g+1 and p
        for p in range(g + 1, m + 1):
            count += p - g
    return count


# transition tables -------------------------------------------------------

_X, _ANY = "x", "any"
_GOOD = frozenset(GOOD)
_FOUR = frozenset({PLUS, MINUS, UPLUS, UMINUS})
_UMU = frozenset({UMINUS, UPLUS})
_P, _U = frozenset({PLUS}), frozenset({UPLUS})

_MIDDLE = {
    (UMINUS, PLUS): {
        "i": (_P, _U, _X),
        "ii": (_FOUR, _U, _X),
        "io": (_UMU, _GOOD, _X),
        "ioi": (_UMU, _U, _ANY),
        "ioo": (_UMU, _P, _ANY),
    },
    (UMINUS, UPLUS): {"i": (_U, _U, _X)},
    (MINUS, PLUS): {
        "o": (_P, _P, _X),
        "oi": (_FOUR, _GOOD, _X),
        "oo": (_UMU, _P, _X),
        "ooi": (_UMU, _U, _ANY),
    },
    (MINUS, UPLUS): {"o": (_U, _P, _X)},
    (QUERY, PLUS): {None: (_FOUR, _GOOD, _ANY)},
    (QUERY, UPLUS): {None: (_U, _GOOD, _ANY)},
}
_FIRST = {MINUS: (_GOOD, _X), UMINUS: (_U, _X), QUERY: (_GOOD, _ANY)}


def check_grade_transition(
    before: Sequence[str], j: int, after: Sequence[str], scenario: str | None
) -> Verdict:
    """Check one repair of ``C_j`` against the table of allowed grade changes."""
    m = len(before)
    if len(after) != m:
        return Verdict(False, None, "grade vectors differ in length")
    for t in range(1, m + 1):
        if abs(t - j) > 1 and before[t - 1] != after[t - 1]:
            return Verdict(False, t, f"cycle {t} changed but is not adjacent to {j}")
    gj = before[j - 1]
    if j == 1:
        row = _FIRST.get(gj)
        if row is None:
            return Verdict(False, j, f"cycle 1 has grade {gj}, nothing to repair")
        cols = {1: row[0], 2: row[1]}
    else:
        key = (gj, before[j - 2])
        table = _MIDDLE.get(key)
        if table is None:
            return Verdict(False, j, f"no table for grades {key}")
        sc = None if gj == QUERY else scenario
        if j == m and sc == "ioo":
            return Verdict(False, j, "impossible row ioo hit on the last cycle")
        row = table.get(sc)
        if row is None:
            return Verdict(False, j, f"impossible row {sc!r} hit for grades {key}")
        cols = {j - 1: row[0], j: row[1], j + 1: row[2]}
    for t, allowed in cols.items():
        if not 1 <= t <= m:
            continue
        old, new = before[t - 1], after[t - 1]
        if allowed == _X:
            ok = old == new
        elif allowed == _ANY:
            ok = True
        else:
            ok = new in allowed
        if not ok:
            return Verdict(False, t, f"cycle {t}: {old} -> {new} not allowed ({sorted(allowed) if not isinstance(allowed, str) else allowed})")
    return Verdict(True)


# solvers -------------------------------------------------------------------


@dataclass
class ChainIteration:
    j: int
    before: tuple[str, ...]
    after: tuple[str, ...]
    mu_before: tuple[int, int, int, int]
    mu_after: tuple[int, int, int, int]
    scenario: str | None
    steps: int


class ChainResult(NamedTuple):
    strategy: JointStrategy
    trace: ImprovementTrace
    iterations: list[ChainIteration]


def _require_plain(game: CoordinationGame) -> None:
    if not game.is_unweighted or game.has_bonuses:
        raise PreconditionError("the chain solver needs an unweighted game without bonuses")


def repair_cycle(
    game: CoordinationGame, dec: ChainDecomposition, s: JointStrategy, j: int
) -> ImprovementTrace:
    """Run the cycle schedule on ``C_j`` until every node of it best-responds.

    ``C_1`` is scheduled from ``[1, 2]`` so that its only link comes last;
    every other cycle from ``[j, 1]``. Link nodes break ties towards their
    predecessor inside ``C_j``.
    """
    cyc = dec.cycle(j)
    ordering = cyc[1:] + cyc[:1] if j == 1 else cyc
    links = [x for x in (dec.up_link(j), dec.down_link(j)) if x is not None]
    policies = {x: ResponsePolicy.PREFER_PREDECESSOR for x in links}
    preds = {x: dec.pred_in(j, x) for x in links}
    bound = 2 * len(cyc) - 1 if j in (1, dec.m) else 3 * len(cyc)
    trace = run_schedule(
        game, s, round_robin(ordering), policies, cap=4 * len(cyc) * bound,
        predecessor=preds, watch=cyc,
    )
    if trace.status not in (TerminalStatus.STABLE, TerminalStatus.NASH):
        raise InternalError(f"repair of cycle {j} did not stabilise ({trace.status.value})")
    if len(trace) > bound:
        raise InternalError(f"repair of cycle {j} took {len(trace)} steps, bound is {bound}")
    return trace


def _scenario(dec: ChainDecomposition, j: int, grade_j: str, trace: ImprovementTrace) -> str | None:
    if j == 1 or grade_j not in (UMINUS, MINUS):
        return None
    letters = ["i" if grade_j == UMINUS else "o"]
    cyc = dec.cycle(j)
    watched = {cyc[0], dec.down_link(j)}
    s = trace.initial
    for step in trace.steps:
        x = step.deviators[0]
        if x in watched:
            letters.append("i" if step.new_colours[0] == s[dec.pred_in(j, x)] else "o")
        s = s.replace({x: step.new_colours[0]})
    return "".join(letters)


def solve_ne_chain(
    game: CoordinationGame,
    s0: JointStrategy | None = None,
    dec: ChainDecomposition | None = None,
    *,
    strict: bool = False,
) -> ChainResult:
    """Repair the first unstable cycle until a Nash equilibrium is reached.

    Total length is at most ``3 v m^3``; exceeding it raises InternalError.
    Iterations where ``mu`` fails to increase are listed in
    ``trace.meta["progress_violations"]``; with ``strict`` they raise
    InternalError instead. They occur only when a middle cycle's down-link
    sits at position 2 or ``v``, where a repair can reach a cycle two
    steps away.
    """
    _require_plain(game)
    if dec is None:
        dec = detect_chain(game)
    if s0 is None:
        s0 = game.default_strategy()
    builder = TraceBuilder(game, s0)
    iterations: list[ChainIteration] = []
    violations: list[int] = []
    bound = 3 * dec.v * dec.m ** 3
    current = grades(game, dec, s0)
    while (j := nbr(current)) is not None:
        part = repair_cycle(game, dec, builder.current, j)
        for step in part.steps:
            builder.switch(step.deviators[0], step.new_colours[0], step.slot)
        after = grades(game, dec, builder.current)
        it = ChainIteration(j, current, after, mu(current), mu(after), _scenario(dec, j, current[j - 1], part), len(part))
        iterations.append(it)
        if it.mu_after <= it.mu_before:
            if strict:
                raise InternalError(f"progress measure did not increase: {it.mu_before} -> {it.mu_after}")
            violations.append(len(iterations))
        current = after
        if len(builder.trace) > bound:
            raise InternalError(f"chain solver exceeded {bound} steps")
    trace = builder.finish(
        TerminalStatus.NASH, bound=bound, m=dec.m, v=dec.v,
        grades=[it.after for it in iterations], mu=[it.mu_after for it in iterations],
        progress_violations=violations,
    )
    return ChainResult(builder.current, trace, iterations)


def low_payoff_nodes_stable(game: CoordinationGame, trace: ImprovementTrace) -> Verdict:
    """Check along a trace that every node with payoff at least 1 best-responds.

    The witness is the index of the first failing strategy and the node.
    """
    for k, s in enumerate(trace.strategies()):
        p = payoffs(game, s)
        for i in game.nodes():
            if p[i - 1] >= 1 and not holds_best_response(game, s, i):
                return Verdict(False, (k, i), f"node {i} has payoff {p[i - 1]} but is not best-responding")
    return Verdict(True)


@dataclass
class ChainStrongResult:
    strategy: JointStrategy
    trace: ImprovementTrace
    jumps: int
    rounds: list[ChainResult] = field(default_factory=list)


def solve_se_chain(
    game: CoordinationGame, s0: JointStrategy | None = None, dec: ChainDecomposition | None = None
) -> ChainStrongResult:
    """Alternate Nash repairs with unicolour coalition jumps until strong.

    At most ``ceil(m / 2)`` jumps and ``4 v m^4`` steps in total.
    """
    from .coalition import find_unicolour_deviation_from_ne

    _require_plain(game)
    if dec is None:
        dec = detect_chain(game)
    if s0 is None:
        s0 = game.default_strategy()
    builder = TraceBuilder(game, s0)
    rounds = []
    jumps = 0
    max_jumps = math.ceil(dec.m / 2)
    bound = 4 * dec.v * dec.m ** 4
    while True:
        result = solve_ne_chain(game, builder.current, dec)
        rounds.append(result)
        for step in result.trace.steps:
            builder.switch(step.deviators[0], step.new_colours[0])
        found = find_unicolour_deviation_from_ne(game, builder.current)
        if found is None:
            break
        members, colour = found
        builder.deviate({i: colour for i in members})
        jumps += 1
        if jumps > max_jumps:
            raise InternalError(f"chain strong solver needed more than {max_jumps} coalition jumps")
        if len(builder.trace) > bound:
            raise InternalError(f"chain strong solver exceeded {bound} steps")
    trace = builder.finish(TerminalStatus.STRONG, jumps=jumps, bound=bound, max_jumps=max_jumps)
    return ChainStrongResult(builder.current, trace, jumps, rounds)


def grade_table(iterations: Sequence[ChainIteration]) -> list[dict[str, object]]:
    """One row per repair, suitable for CSV output."""
    rows = []
    for k, it in enumerate(iterations, start=1):
        rows.append(
            {
                "iteration": k,
                "cycle": it.j,
                "grades_before": " ".join(it.before),
                "grades_after": " ".join(it.after),
                "mu_before": "(" + ",".join(map(str, it.mu_before)) + ")",
                "mu_after": "(" + ",".join(map(str, it.mu_after)) + ")",
                "scenario": it.scenario or "",
                "steps": it.steps,
            }
        )
    return rows

