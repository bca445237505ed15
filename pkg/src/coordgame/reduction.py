"""From 3-CNF formulas to coordination games, and back.

Each clause becomes a nine-node gadget with no Nash equilibrium of its
own. A heavy edge from a variable node lets one of the gadget's three
ports settle on the literal's truth value, which breaks the gadget's
cycle. The game therefore has a Nash equilibrium iff the formula is
satisfiable.

Node layout of a reduced game: variable nodes ``1..n`` first, then nine
nodes per clause in clause order (see :data:`GADGET_ROLES`), then relay
nodes if weights were eliminated.
"""

from __future__ import annotations

import itertools
import random
from collections.abc import Iterable, Mapping
from dataclasses import dataclass

import numpy as np

from .dag_solver import solve_dag
from .errors import GameError, PreconditionError
from .model import CoordinationGame, JointStrategy, as_rng, require_nash

RED, GREEN, BLUE, TRUE, FALSE = "red", "green", "blue", "true", "false"
PALETTE = [RED, GREEN, BLUE, TRUE, FALSE]
PORT_WEIGHT = 4

GADGET_ROLES = ("A", "B", "C", "source_A", "source_C", "source_B", "relay_BC", "relay_CA", "relay_AB")
"""Order of the nine gadget nodes. Sources are single-colour feeders;
``relay_XY`` sits on a two-hop path from port X to port Y."""

Literal = tuple[int, bool]


@dataclass(frozen=True)
class CnfFormula:
    """Clauses of exactly three literals ``(variable, positive)``."""

    n: int
    clauses: tuple[tuple[Literal, Literal, Literal], ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise GameError("a formula needs at least one variable")
        if not self.clauses:
            raise GameError("a formula needs at least one clause")
        for k, clause in enumerate(self.clauses, start=1):
            if len(clause) != 3:
                raise GameError(f"clause {k} has {len(clause)} literals, expected 3")
            for var, _ in clause:
                if not 1 <= var <= self.n:
                    raise GameError(f"clause {k} uses variable {var} outside 1..{self.n}")

    @classmethod
    def from_ints(cls, n: int, clauses: Iterable[Iterable[int]]) -> CnfFormula:
        """DIMACS-style integers: ``-2`` is the negation of variable 2."""
        return cls(n, tuple(tuple((abs(x), x > 0) for x in c) for c in clauses))

    def to_ints(self) -> list[list[int]]:
        return [[v if pos else -v for v, pos in c] for c in self.clauses]

    def satisfied_by(self, assignment: Mapping[int, bool]) -> bool:
        return all(any(assignment[v] == pos for v, pos in c) for c in self.clauses)


def parse_dimacs(text: str) -> CnfFormula:
    """Parse DIMACS CNF; comment lines start with ``c`` and clauses end with ``0``."""
    n = None
    declared = None
    clauses: list[list[int]] = []
    current: list[int] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise GameError(f"line {lineno}: expected 'p cnf VARS CLAUSES'")
            n, declared = int(parts[2]), int(parts[3])
            continue
        if n is None:
            raise GameError(f"line {lineno}: clause before the 'p cnf' header")
        for tok in line.split():
            try:
                x = int(tok)
            except ValueError:
                raise GameError(f"line {lineno}: not an integer: {tok!r}") from None
            if x == 0:
                clauses.append(current)
                current = []
            else:
                current.append(x)
    if current:
        clauses.append(current)
    if n is None:
        raise GameError("missing 'p cnf' header")
    if declared is not None and declared != len(clauses):
        raise GameError(f"header declares {declared} clauses, found {len(clauses)}")
    return CnfFormula.from_ints(n, clauses)


def emit_dimacs(formula: CnfFormula) -> str:
    lines = [f"p cnf {formula.n} {len(formula.clauses)}"]
    lines += [" ".join(map(str, c)) + " 0" for c in formula.to_ints()]
    return "\n".join(lines) + "\n"


def _truth(positive: bool) -> str:
    return TRUE if positive else FALSE


def gadget_parts(x: str, y: str, z: str) -> tuple[list[list[str]], list[tuple[int, int, int]]]:
    """Colour sets and edges of one gadget with local ids ``1..9``.

    ``x``, ``y``, ``z`` are the truth colours available to ports A, B, C.
    """
    sets = [
        [RED, GREEN, x],   # A
        [RED, BLUE, y],    # B
        [GREEN, BLUE, z],  # C
        [RED],             # source_A
        [GREEN],           # source_C
        [BLUE],            # source_B
        [RED, BLUE],       # relay_BC
        [GREEN, BLUE],     # relay_CA
        [RED, GREEN],      # relay_AB
    ]
    edges = [
        (1, 2, 1), (2, 3, 1), (3, 1, 1),
        (4, 1, 2), (5, 3, 2), (6, 2, 2),
        (2, 7, 1), (7, 3, 2),
        (3, 8, 1), (8, 1, 2),
        (1, 9, 1), (9, 2, 2),
    ]
    return sets, edges


def build_gadget(x: bool | str, y: bool | str, z: bool | str) -> CoordinationGame:
    """A standalone gadget; it has no Nash equilibrium for any parameters."""
    params = [_truth(p) if isinstance(p, bool) else p for p in (x, y, z)]
    for p in params:
        if p not in (TRUE, FALSE):
            raise GameError(f"gadget parameter must be true or false, got {p!r}")
    sets, edges = gadget_parts(*params)
    return CoordinationGame(9, sets, edges, palette=PALETTE)


def gadget_nodes(formula: CnfFormula, clause: int) -> dict[str, int]:
    """Global node ids of clause ``clause`` (1-based) by role."""
    base = formula.n + 9 * (clause - 1)
    return {role: base + k for k, role in enumerate(GADGET_ROLES, start=1)}


def reduce_cnf_to_game(formula: CnfFormula) -> CoordinationGame:
    """Weighted game with a Nash equilibrium iff ``formula`` is satisfiable."""
    sets: list[list[str]] = [[TRUE, FALSE] for _ in range(formula.n)]
    edges: list[tuple[int, int, int]] = []
    for k, clause in enumerate(formula.clauses, start=1):
        local_sets, local_edges = gadget_parts(*(_truth(pos) for _, pos in clause))
        sets += local_sets
        ids = gadget_nodes(formula, k)
        offset = ids["A"] - 1
        edges += [(u + offset, v + offset, w) for u, v, w in local_edges]
        for (var, _), port in zip(clause, ("A", "B", "C")):
            edges.append((var, ids[port], PORT_WEIGHT))
    return CoordinationGame(len(sets), sets, edges, palette=PALETTE)


def eliminate_weights(game: CoordinationGame, preserve_unit_edges: bool = False) -> CoordinationGame:
    """Replace each edge ``u -> v`` of weight ``w`` by ``w`` relays ``u -> r -> v``.

    Relays take the colour set of ``u`` and are numbered after the
    original nodes, following the edge order. With ``preserve_unit_edges``
    weight-1 edges stay direct.
    """
    sets = [list(game.colours(i)) for i in game.nodes()]
    edges: list[tuple[int, int]] = []
    for u, v, w in game.edges:
        if w == 1 and preserve_unit_edges:
            edges.append((u, v))
            continue
        for _ in range(w):
            sets.append(list(game.colours(u)))
            r = len(sets)
            edges += [(u, r), (r, v)]
    bonuses = {(i, c): b for i, c, b in game.bonus_items()}
    return CoordinationGame(len(sets), sets, edges, bonuses, game.palette)


def lift_to_relays(weighted_n: int, unweighted: CoordinationGame, s: JointStrategy) -> JointStrategy:
    """Extend a strategy of the weighted game: each relay copies its source."""
    colours = list(s.colours)
    for r in range(weighted_n + 1, unweighted.n + 1):
        colours.append(colours[unweighted.in_edges(r)[0][0] - 1])
    return JointStrategy(tuple(colours))


def project_from_relays(weighted_n: int, s: JointStrategy) -> JointStrategy:
    return JointStrategy(s.colours[:weighted_n])


def extract_assignment(formula: CnfFormula, game: CoordinationGame, ne: JointStrategy) -> dict[int, bool]:
    """Read the truth assignment off the variable nodes of a Nash equilibrium."""
    require_nash(game, ne)
    true_id = game.colour_id(TRUE)
    return {j: ne[j] == true_id for j in range(1, formula.n + 1)}


def complete_from_assignment(
    formula: CnfFormula, assignment: Mapping[int, bool], game: CoordinationGame | None = None
) -> JointStrategy:
    """Nash equilibrium of the reduced game extending a satisfying assignment.

    Variable nodes take their truth value and every port whose literal is
    true takes it too. What remains is acyclic and is settled by one
    topological pass.
    """
    if not formula.satisfied_by(assignment):
        raise PreconditionError("the assignment does not satisfy the formula")
    if game is None:
        game = reduce_cnf_to_game(formula)
    fixed = {j: game.colour_id(_truth(assignment[j])) for j in range(1, formula.n + 1)}
    for k, clause in enumerate(formula.clauses, start=1):
        ids = gadget_nodes(formula, k)
        for (var, pos), port in zip(clause, ("A", "B", "C")):
            if assignment[var] == pos:
                fixed[ids[port]] = game.colour_id(_truth(pos))
    s0 = game.default_strategy().replace(fixed)
    s, _ = solve_dag(game, s0, frozen=fixed)
    return s


def brute_sat(formula: CnfFormula) -> dict[int, bool] | None:
    """First satisfying assignment in lexicographic order, or None."""
    for bits in itertools.product([False, True], repeat=formula.n):
        assignment = dict(enumerate(bits, start=1))
        if formula.satisfied_by(assignment):
            return assignment
    return None


def random_cnf(rng: random.Random | int | None, n: int, clauses: int) -> CnfFormula:
    rng = as_rng(rng)
    out = []
    for _ in range(clauses):
        out.append(tuple((rng.randint(1, n), rng.random() < 0.5) for _ in range(3)))
    return CnfFormula(n, tuple(out))


def cnf_corpus(max_vars: int = 4, max_clauses: int = 3, count: int = 120, seed: int = 0) -> list[CnfFormula]:
    """Deterministic mix of random formulas plus a few fixed unsatisfiable ones."""
    rng = random.Random(seed)
    corpus = [
        CnfFormula.from_ints(1, [[1, 1, 1], [-1, -1, -1]]),
        CnfFormula.from_ints(2, [[1, 1, 2], [-1, -1, 2], [-2, -2, -2]]),
    ]
    while len(corpus) < count:
        corpus.append(random_cnf(rng, rng.randint(1, max_vars), rng.randint(1, max_clauses)))
    return corpus


@dataclass(frozen=True)
class PolymatrixView:
    """Pairwise tables ``tables[(i, j)][a, b]``: what node ``i`` gets from ``j``
    when ``i`` plays ``a`` and ``j`` plays ``b``. Absent pairs are all zero."""

    n: int
    l: int
    tables: dict[tuple[int, int], np.ndarray]
    bonuses: np.ndarray  # shape (n + 1, l), row 0 unused

    def table(self, i: int, j: int) -> np.ndarray:
        return self.tables.get((i, j), np.zeros((self.l, self.l), dtype=np.int64))

    def payoff(self, s: JointStrategy, i: int) -> int:
        total = int(self.bonuses[i, s[i]])
        for (a, b), t in self.tables.items():
            if a == i:
                total += int(t[s[i], s[b]])
        return total


def export_polymatrix(game: CoordinationGame) -> PolymatrixView:
    tables = {}
    for u, v, w in game.edges:
        t = np.zeros((game.l, game.l), dtype=np.int64)
        np.fill_diagonal(t, w)
        tables[(v, u)] = t
    bonuses = np.zeros((game.n + 1, game.l), dtype=np.int64)
    for i, c, b in game.bonus_items():
        bonuses[i, c] = b
    return PolymatrixView(game.n, game.l, tables, bonuses)
