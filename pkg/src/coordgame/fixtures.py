"""Hand-built reference games with known properties.

Used by the tests, the acceptance suite and the CLI ``--fixture`` option.
"""

from __future__ import annotations

from .model import CoordinationGame, JointStrategy


def three_colour_no_ne() -> tuple[CoordinationGame, JointStrategy]:
    """Unweighted 9-node game on three colours without a Nash equilibrium.

    Nodes 1, 2, 3 form a cycle that is doubled by 4, 5, 6; nodes 7, 8, 9
    are fixed single-colour sources. The returned strategy has payoffs
    ``(0, 1, 2, 1, 1, 1, 0, 0, 0)``.
    """
    sets = [
        ["a", "b"], ["a", "c"], ["b", "c"],
        ["a", "b"], ["a", "c"], ["b", "c"],
        ["a"], ["c"], ["b"],
    ]
    edges = [
        (1, 2), (2, 3), (3, 1), (1, 4), (4, 2), (2, 5),
        (5, 3), (3, 6), (6, 1), (7, 1), (8, 2), (9, 3),
    ]
    game = CoordinationGame(9, sets, edges, palette=["a", "b", "c"])
    return game, game.strategy(["b", "c", "c", "b", "c", "c", "a", "c", "b"])


def weighted_triangle_no_ne() -> CoordinationGame:
    """3-cycle with weight-2 edges and three unit bonuses; no Nash equilibrium."""
    return CoordinationGame(
        3,
        [["a", "b"], ["a", "c"], ["b", "c"]],
        [(1, 2, 2), (2, 3, 2), (3, 1, 2)],
        {(1, "a"): 1, (2, "c"): 1, (3, "b"): 1},
        palette=["a", "b", "c"],
    )


def rotating_cycle(n: int = 3) -> CoordinationGame:
    """Unweighted ``n``-cycle where every node has colours {a, b}.

    Improvement paths can rotate forever, yet some path from every start
    terminates.
    """
    return CoordinationGame(n, [["a", "b"]] * n, [(i, i % n + 1) for i in range(1, n + 1)])


def long_path_cycle(n: int = 6) -> tuple[CoordinationGame, JointStrategy]:
    """Unweighted ``n``-cycle (n >= 5) with one bonus, plus its slow start.

    Under the clockwise schedule from node 1, restricted to max-bonus
    responses, the start ``(b, ..., b, a, d, a)`` yields a path of length
    ``3n - 5`` ending in ``(c, ..., c)``.
    """
    if n < 5:
        raise ValueError("the construction needs n >= 5")
    full = ["a", "b", "c", "d"]
    sets = [full] * (n - 3) + [["a", "c"], ["c", "d"], full]
    game = CoordinationGame(
        n,
        sets,
        [(i, i % n + 1) for i in range(1, n + 1)],
        {(n - 2, "c"): 1},
        palette=full,
    )
    return game, game.strategy(["b"] * (n - 3) + ["a", "d", "a"])


def bidirectional_square() -> tuple[CoordinationGame, JointStrategy]:
    """Bidirectional 4-cycle on {a, b} with the Nash equilibrium (a, a, b, b).

    That equilibrium is not strong: nodes 3 and 4 both gain by moving to a.
    """
    edges = []
    for i in range(1, 5):
        j = i % 4 + 1
        edges += [(i, j), (j, i)]
    game = CoordinationGame(4, [["a", "b"]] * 4, edges)
    return game, game.strategy(["a", "a", "b", "b"])


def five_cycle_chain() -> tuple[CoordinationGame, JointStrategy, tuple[tuple[int, ...], ...]]:
    """Open chain of five 3-cycles on {R, B} with a sample colouring.

    Returns the game, the colouring and the cycles as node tuples
    ``([j,1], [j,2], [j,3])``. Link nodes: [1,1]=[2,3], [2,1]=[3,2],
    [3,1]=[4,2], [4,1]=[5,3]. Its grade vector is (-, U+, ?, +, U+).
    """
    # node ids: cycle j contributes its own new nodes in label order
    cycles = (
        (1, 2, 3),
        (4, 5, 1),
        (6, 4, 7),
        (8, 6, 9),
        (10, 11, 8),
    )
    edges = []
    for cyc in cycles:
        for k in range(3):
            edges.append((cyc[k], cyc[(k + 1) % 3]))
    colours = {
        1: "R", 2: "B", 3: "B",
        4: "R", 5: "R",
        6: "B", 7: "B",
        8: "R", 9: "B",
        10: "R", 11: "R",
    }
    game = CoordinationGame(11, [["R", "B"]] * 11, edges, palette=["B", "R"])
    s = game.strategy([colours[i] for i in range(1, 12)])
    return game, s, cycles


def unreachable_strong_game() -> tuple[CoordinationGame, JointStrategy]:
    """12-node game with strong equilibria that no c-improvement path reaches.

    Nodes 10, 11, 12 stand for A, B, C. The returned strategy is the one
    from which no c-improvement path terminates; the three unicolour
    strategies are strong equilibria.
    """
    edges = [(1, 2, 2), (2, 3, 2), (3, 1, 2)]
    A, B, C = 10, 11, 12
    for u, v, w in [
        (4, 1, 2), (1, 5, 3), (2, 6, 2), (2, 7, 3), (8, 3, 2), (9, 3, 3),
        (5, A, 3), (A, 6, 2), (B, 4, 2), (9, B, 3), (8, C, 2), (C, 7, 3),
    ]:
        edges += [(u, v, w), (v, u, w)]
    game = CoordinationGame(12, [["a", "b", "c"]] * 12, edges)
    start = game.strategy(["a", "a", "b", "b", "a", "a", "c", "c", "b", "a", "b", "c"])
    return game, start


def bonus_triangle_no_ne() -> CoordinationGame:
    """Weight-2 3-cycle on {a, b, c} where each node has bonuses 3 and 2; no Nash equilibrium."""
    return CoordinationGame(
        3,
        [["a", "b", "c"]] * 3,
        [(1, 2, 2), (2, 3, 2), (3, 1, 2)],
        {(1, "a"): 3, (1, "b"): 2, (2, "a"): 2, (2, "c"): 3, (3, "b"): 3, (3, "c"): 2},
    )


def grade_examples() -> dict[str, tuple[tuple[str, ...], tuple[int, int, int, int]]]:
    """Grade vectors with their (NBR, guard, |prefix|) and progress measure."""
    return {
        "s1": (("+", "U+", "U+", "+", "-", "U-", "?"), (5, 3, 5), (3, 0, 5, -5)),
        "s2": (("+", "U+", "-", "+", "U+", "U-", "U-", "?"), (3, 2, 5), (2, 1, 0, -3)),
    }


PROGRESS_RUN: tuple[tuple[str, tuple[int, int, int, int]], ...] = (
    ("+ + + + ? U+ U+ -", (0, 0, 5, -5)),
    ("+ + + - + ? U+ -", (0, 0, 5, -4)),
    ("+ + - + + ? U+ -", (0, 0, 5, -3)),
    ("+ U- U+ ? + ? U+ -", (0, 1, 0, -2)),
    ("U- + ? ? + ? U+ -", (0, 1, 0, -1)),
    ("U+ + ? ? + ? U+ -", (1, 0, 3, -3)),
    ("U+ + U+ ? + ? U+ -", (3, 0, 4, -4)),
    ("U+ + U+ + + ? U+ -", (3, 0, 6, -6)),
    ("U+ + U+ + + U+ U+ -", (7, 0, 8, -8)),
    ("U+ + U+ + + U+ U+ +", (9, 0, 0, 0)),
)
"""An eight-cycle run: grade vectors and their progress measures."""


def chain_progress_counterexample() -> tuple[CoordinationGame, JointStrategy]:
    """Chain of five 3-cycles where repairing C_4 lowers the progress measure.

    Repairing C_4 recolours node 6 = [3,1]; node 4 = [3,2] = [2,1] then
    loses its best response, so the grade of C_2 changes although C_2 is
    not adjacent to C_4.
    """
    game, _, _ = five_cycle_chain()
    sets = [["a"], ["a", "b"], ["b"], ["a", "b"], ["a"], ["a", "b"],
            ["a"], ["a", "b"], ["a", "b"], ["a", "b"], ["a"]]
    game = CoordinationGame(11, sets, game.edges, palette=["a", "b"])
    return game, game.strategy(["a", "a", "b", "b", "a", "b", "a", "b", "a", "a", "a"])
