"""Schedules, improvement paths and their traces.

A schedule is a sequence of node ids. Running it from a joint strategy
visits the nodes in order: a node already holding a best response is
skipped, any other node switches to a best response picked by the
response policy. Only actual switches count as steps.
"""

from __future__ import annotations

import itertools
import re
from collections.abc import Collection, Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from enum import Enum

from .errors import GameError
from .model import (
    Coalition,
    CoordinationGame,
    JointStrategy,
    ResponsePolicy,
    Verdict,
    choose,
    colour_values,
    default_predecessor,
    is_nash,
    payoff,
)


class TerminalStatus(str, Enum):
    NASH = "nash"
    STRONG = "strong"
    # every watched node holds a best response; used for runs restricted to part of a game
    STABLE = "stable"
    SCHEDULE_END = "schedule_end"
    CAP_EXHAUSTED = "cap_exhausted"


@dataclass(frozen=True)
class Step:
    """One (possibly coalitional) deviation.

    Per-member tuples are aligned with ``deviators``, which is sorted.
    ``slot`` is the schedule position that produced the step, when known.
    """

    deviators: Coalition
    old_colours: tuple[int, ...]
    new_colours: tuple[int, ...]
    old_payoffs: tuple[int, ...]
    new_payoffs: tuple[int, ...]
    slot: int | None = None

    @property
    def is_single(self) -> bool:
        return len(self.deviators) == 1


@dataclass
class ImprovementTrace:
    initial: JointStrategy
    steps: list[Step] = field(default_factory=list)
    status: TerminalStatus = TerminalStatus.SCHEDULE_END
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.steps)

    def strategies(self) -> Iterator[JointStrategy]:
        """Yield the initial strategy and the strategy after every step."""
        s = self.initial
        yield s
        for step in self.steps:
            s = s.replace(dict(zip(step.deviators, step.new_colours)))
            yield s

    @property
    def final(self) -> JointStrategy:
        *_, last = self.strategies()
        return last

    def coalition_steps(self) -> int:
        return sum(1 for step in self.steps if not step.is_single)

    def extend(self, other: ImprovementTrace) -> None:
        if other.initial != self.final:
            raise GameError("cannot join traces that do not meet")
        self.steps.extend(other.steps)


class TraceBuilder:
    """Single-owner helper that applies deviations and records them."""

    def __init__(self, game: CoordinationGame, s0: JointStrategy):
        game.check_strategy(s0)
        self.game = game
        self.trace = ImprovementTrace(initial=s0)
        self.current = s0

    def switch(self, i: int, colour: int, slot: int | None = None) -> Step:
        return self.deviate({i: colour}, slot)

    def deviate(self, updates: Mapping[int, int], slot: int | None = None) -> Step:
        members = tuple(sorted(i for i, c in updates.items() if self.current[i] != c))
        if not members:
            raise GameError("a deviation must change at least one node")
        s2 = self.current.replace(updates)
        step = Step(
            deviators=members,
            old_colours=tuple(self.current[i] for i in members),
            new_colours=tuple(s2[i] for i in members),
            old_payoffs=tuple(payoff(self.game, self.current, i) for i in members),
            new_payoffs=tuple(payoff(self.game, s2, i) for i in members),
            slot=slot,
        )
        self.trace.steps.append(step)
        self.current = s2
        return step

    def finish(self, status: TerminalStatus, **meta) -> ImprovementTrace:
        self.trace.status = status
        self.trace.meta.update(meta)
        return self.trace


def round_robin(ordering: Sequence[int]) -> Iterator[int]:
    """Infinite schedule repeating ``ordering``."""
    return itertools.cycle(tuple(ordering))


def run_schedule(
    game: CoordinationGame,
    s0: JointStrategy,
    schedule: Iterable[int],
    policy: ResponsePolicy | Mapping[int, ResponsePolicy] = ResponsePolicy.LOWEST_ID,
    cap: int | None = None,
    *,
    predecessor: Mapping[int, int] | None = None,
    watch: Collection[int] | None = None,
    stop_when_stable: bool = True,
    slot_cap: int | None = None,
) -> ImprovementTrace:
    """Generate the improvement path of ``schedule`` from ``s0``.

    Args:
        policy: one policy for all nodes, or a per-node mapping (missing
            nodes use ``lowest-id``).
        cap: maximum number of steps. Default ``4 * n * n * l``.
        predecessor: node whose colour counts as the predecessor's colour,
            per node. Defaults to the unique in-neighbour.
        watch: nodes whose stability ends the run; defaults to all nodes.
            The run stops once every watched node has been visited and
            skipped since the last step.
        slot_cap: maximum number of visited schedule slots, a guard against
            infinite schedules that never visit some node.
    """
    game.check_strategy(s0)
    n = game.n
    if cap is None:
        cap = 4 * n * n * game.l
    watched = frozenset(watch) if watch is not None else frozenset(game.nodes())
    if slot_cap is None:
        slot_cap = (cap + 2) * max(len(watched), 1) * 2
    predecessor = predecessor or {}
    per_node = policy if isinstance(policy, Mapping) else None
    builder = TraceBuilder(game, s0)
    quiet: set[int] = set()
    status = TerminalStatus.SCHEDULE_END

    if stop_when_stable and _stable(game, s0, watched):
        status = TerminalStatus.NASH if len(watched) == n else TerminalStatus.STABLE
        return builder.finish(status)

    for slot, i in enumerate(schedule):
        if slot >= slot_cap:
            status = TerminalStatus.CAP_EXHAUSTED
            break
        s = builder.current
        values = colour_values(game, s, i)
        top = max(values.values())
        if values[s[i]] == top:
            quiet.add(i)
            if stop_when_stable and watched <= quiet:
                status = TerminalStatus.NASH if len(watched) == n else TerminalStatus.STABLE
                break
            continue
        if len(builder.trace.steps) >= cap:
            status = TerminalStatus.CAP_EXHAUSTED
            break
        node_policy = per_node.get(i, ResponsePolicy.LOWEST_ID) if per_node is not None else policy
        maximizers = sorted(c for c, v in values.items() if v == top)
        pred = predecessor.get(i, default_predecessor(game, i))
        builder.switch(i, choose(game, s, i, maximizers, ResponsePolicy(node_policy), pred), slot)
        quiet.clear()
    else:
        if stop_when_stable and _stable(game, builder.current, watched):
            status = TerminalStatus.NASH if len(watched) == n else TerminalStatus.STABLE
    return builder.finish(status)


def _stable(game: CoordinationGame, s: JointStrategy, nodes: Iterable[int]) -> bool:
    for i in nodes:
        values = colour_values(game, s, i)
        if values[s[i]] < max(values.values()):
            return False
    return True


def validate_trace(
    game: CoordinationGame, trace: ImprovementTrace, *, strong_evidence: bool | None = None
) -> Verdict:
    """Recheck a trace from scratch.

    The witness of a failing verdict is the index of the first bad step, or
    ``len(trace)`` when only the terminal status is wrong. A ``strong``
    status is accepted only if the caller passes ``strong_evidence=True``
    (obtained from the oracle); the final strategy must at least be Nash.
    """
    try:
        game.check_strategy(trace.initial)
    except GameError as exc:
        return Verdict(False, 0, f"initial strategy invalid: {exc}")
    s = trace.initial
    for k, step in enumerate(trace.steps):
        members = step.deviators
        if not members:
            return Verdict(False, k, "empty deviating set")
        if list(members) != sorted(set(members)):
            return Verdict(False, k, "deviators must be sorted and distinct")
        sizes = {len(step.old_colours), len(step.new_colours), len(step.old_payoffs), len(step.new_payoffs)}
        if sizes != {len(members)}:
            return Verdict(False, k, "per-member fields have the wrong length")
        for i, old in zip(members, step.old_colours):
            if not 1 <= i <= game.n:
                return Verdict(False, k, f"unknown node {i}")
            if s[i] != old:
                return Verdict(False, k, f"node {i} recorded old colour {old}, actual {s[i]}")
        s2 = s.replace(dict(zip(members, step.new_colours)))
        try:
            game.check_strategy(s2)
        except GameError as exc:
            return Verdict(False, k, str(exc))
        if s.differing(s2) != members:
            return Verdict(False, k, "deviating set differs from the strategy change")
        for i, p_old, p_new in zip(members, step.old_payoffs, step.new_payoffs):
            actual_old, actual_new = payoff(game, s, i), payoff(game, s2, i)
            if (p_old, p_new) != (actual_old, actual_new):
                return Verdict(
                    False, k, f"node {i} payoffs recorded {p_old}->{p_new}, actual {actual_old}->{actual_new}"
                )
            if actual_new <= actual_old:
                return Verdict(False, k, f"node {i} does not strictly improve")
        s = s2
    if trace.status in (TerminalStatus.NASH, TerminalStatus.STRONG) and not is_nash(game, s):
        return Verdict(False, len(trace.steps), "final strategy is not a Nash equilibrium")
    if trace.status is TerminalStatus.STRONG and strong_evidence is not True:
        return Verdict(False, len(trace.steps), "strong status needs oracle evidence")
    return Verdict(True)


def _fmt(values: Sequence[object]) -> str:
    return ",".join(str(v) for v in values)


def format_step(game: CoordinationGame, k: int, step: Step) -> str:
    """``step k: nodes {i,j} colours a,b→c,c payoffs 0,1→2,2``."""
    old = _fmt(game.palette[c] for c in step.old_colours)
    new = _fmt(game.palette[c] for c in step.new_colours)
    return (
        f"step {k}: nodes {{{_fmt(step.deviators)}}} colours {old}→{new} "
        f"payoffs {_fmt(step.old_payoffs)}→{_fmt(step.new_payoffs)}"
    )


def format_trace(game: CoordinationGame, trace: ImprovementTrace) -> str:
    lines = [f"start: {' '.join(trace.initial.names(game))}"]
    lines += [format_step(game, k, step) for k, step in enumerate(trace.steps, start=1)]
    lines.append(f"end: {' '.join(trace.final.names(game))} ({trace.status.value})")
    return "\n".join(lines)


_STEP_RE = re.compile(
    r"^step (\d+): nodes \{([\d,]+)\} colours (\S+)→(\S+) payoffs ([\d,]+)→([\d,]+)$"
)


def parse_trace(game: CoordinationGame, text: str) -> ImprovementTrace:
    """Inverse of :func:`format_trace` (slots are not serialized)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("start: "):
        raise GameError("trace: first line must start with 'start: '")
    initial = game.strategy(lines[0][len("start: "):].split())
    trace = ImprovementTrace(initial=initial)
    for lineno, line in enumerate(lines[1:], start=2):
        if line.startswith("end: "):
            status = line.rsplit("(", 1)[-1].rstrip(")")
            try:
                trace.status = TerminalStatus(status)
            except ValueError:
                raise GameError(f"trace line {lineno}: unknown status {status!r}") from None
            break
        m = _STEP_RE.match(line)
        if not m:
            raise GameError(f"trace line {lineno}: cannot parse {line!r}")
        members = tuple(int(x) for x in m.group(2).split(","))
        trace.steps.append(
            Step(
                deviators=members,
                old_colours=tuple(game.colour_id(c) for c in m.group(3).split(",")),
                new_colours=tuple(game.colour_id(c) for c in m.group(4).split(",")),
                old_payoffs=tuple(int(x) for x in m.group(5).split(",")),
                new_payoffs=tuple(int(x) for x in m.group(6).split(",")),
            )
        )
    return trace
