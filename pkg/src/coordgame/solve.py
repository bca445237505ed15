"""Pick the right solver for a game and run it."""

from __future__ import annotations

from dataclasses import dataclass

from . import oracle
from .chain_solver import solve_ne_chain, solve_se_chain
from .coalition import is_strong_by_coalitions
from .cycle_solver import solve_ne_cycle, solve_se_cycle
from .dag_solver import solve_dag
from .dynamics import ImprovementTrace
from .errors import CapExceeded
from .gamefile import Classification, classify
from .model import CoordinationGame, JointStrategy
from .two_colour_solver import solve_ne_two_colour, solve_se_two_colour

SOLVED, NONE_EXISTS, UNDECIDED = "solved", "none", "undecided"


@dataclass
class Outcome:
    status: str
    classification: Classification
    strategy: JointStrategy | None = None
    trace: ImprovementTrace | None = None
    method: str = ""
    message: str = ""


def solve_game(
    game: CoordinationGame,
    target: str = "ne",
    s0: JointStrategy | None = None,
    *,
    cap: int = oracle.DEFAULT_CAP,
    budget: int = oracle.SEARCH_BUDGET,
) -> Outcome:
    """Solve with the class's schedule, or fall back to exhaustive search.

    The fallback never claims that no equilibrium exists unless the whole
    space (or the pruned search) was covered.
    """
    if target not in ("ne", "se"):
        raise ValueError(f"target must be 'ne' or 'se', got {target!r}")
    cls = classify(game)
    strong = target == "se"
    if s0 is None:
        s0 = game.default_strategy()
    if cls.supported:
        if cls.kind == "dag":
            s, trace = solve_dag(game, s0)
        elif cls.kind == "simple_cycle":
            result = (solve_se_cycle if strong else solve_ne_cycle)(game, s0)
            s, trace = result.strategy, result.trace
        elif cls.kind == "open_chain":
            if strong:
                res = solve_se_chain(game, s0)
                s, trace = res.strategy, res.trace
            else:
                res = solve_ne_chain(game, s0)
                s, trace = res.strategy, res.trace
        else:
            s, trace = (solve_se_two_colour if strong else solve_ne_two_colour)(game, s0)
        return Outcome(SOLVED, cls, s, trace, method=cls.kind)

    if game.strategy_count() <= cap:
        candidates = iter(oracle.enumerate_nash(game, cap))
    else:
        candidates = oracle.search_nash(game, budget=budget)
    try:
        for s in candidates:
            if not strong or is_strong_by_coalitions(game, s):
                return Outcome(SOLVED, cls, s, method="search")
    except CapExceeded as exc:
        return Outcome(
            UNDECIDED, cls, method="search",
            message=f"{exc}; deciding equilibrium existence is NP-hard in general",
        )
    kind = "strong equilibrium" if strong else "Nash equilibrium"
    return Outcome(NONE_EXISTS, cls, method="search", message=f"exhaustive search found no {kind}")
