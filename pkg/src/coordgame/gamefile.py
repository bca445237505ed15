"""Game and strategy files, DOT export and structural classification.

A game file is a JSON object with the keys ``nodes`` (count), ``colours``
(palette), ``sets`` (node id -> colour names), ``edges`` (``[u, v]`` or
``[u, v, w]``) and optionally ``bonuses`` (``[node, colour, value]``).
Unknown keys are rejected. :func:`emit_game` writes the canonical form:
keys in that order, edges sorted, weight 1 omitted, bonuses sorted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .chain_solver import detect_chain
from .cycle_solver import CycleVariant, classify_cycle, is_simple_cycle
from .dag_solver import is_dag
from .errors import GameError, NotAChain
from .model import CoordinationGame, JointStrategy

KEYS = ("nodes", "colours", "sets", "edges", "bonuses")


def _fail(where: str, message: str) -> GameError:
    return GameError(f"{where}: {message}")


def parse_game(data: bytes | str) -> CoordinationGame:
    """Parse a game file; errors name the offending line or field."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise GameError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise GameError("top level must be an object")
    unknown = sorted(set(doc) - set(KEYS))
    if unknown:
        raise _fail(unknown[0], "unknown key")
    for key in KEYS[:4]:
        if key not in doc:
            raise _fail(key, "missing key")

    n = doc["nodes"]
    if not isinstance(n, int) or isinstance(n, bool):
        raise _fail("nodes", "must be an integer")
    palette = doc["colours"]
    if not isinstance(palette, list) or not all(isinstance(c, str) for c in palette):
        raise _fail("colours", "must be a list of names")
    if len(set(palette)) != len(palette):
        raise _fail("colours", "duplicate colour name")

    raw_sets = doc["sets"]
    if not isinstance(raw_sets, dict):
        raise _fail("sets", "must map node ids to colour lists")
    sets: dict[int, list[str]] = {}
    for key, colours in raw_sets.items():
        try:
            node = int(key)
        except ValueError:
            raise _fail(f"sets[{key!r}]", "node id must be an integer") from None
        if not isinstance(colours, list) or not colours:
            raise _fail(f"sets[{key}]", "colour set must be a non-empty list")
        for c in colours:
            if c not in palette:
                raise _fail(f"sets[{key}]", f"unknown colour {c!r}")
        sets[node] = colours
    missing = [i for i in range(1, n + 1) if i not in sets]
    if missing:
        raise _fail("sets", f"no colour set for node {missing[0]}")
    extra = [i for i in sets if not 1 <= i <= n]
    if extra:
        raise _fail(f"sets[{extra[0]}]", f"node outside 1..{n}")

    edges = []
    for k, e in enumerate(doc["edges"]):
        where = f"edges[{k}]"
        if not isinstance(e, list) or len(e) not in (2, 3) or not all(isinstance(x, int) for x in e):
            raise _fail(where, "edge must be [u, v] or [u, v, w] with integers")
        u, v, w = (*e, 1) if len(e) == 2 else e
        if w <= 0:
            raise _fail(where, f"weight must be positive, got {w}")
        edges.append((u, v, w))

    bonuses = {}
    for k, b in enumerate(doc.get("bonuses", [])):
        where = f"bonuses[{k}]"
        if not isinstance(b, list) or len(b) != 3:
            raise _fail(where, "bonus must be [node, colour, value]")
        node, colour, value = b
        if colour not in palette:
            raise _fail(where, f"unknown colour {colour!r}")
        if not isinstance(value, int) or value < 0:
            raise _fail(where, "bonus must be a non-negative integer")
        if (node, colour) in bonuses:
            raise _fail(where, "duplicate bonus entry")
        bonuses[(node, colour)] = value
    try:
        return CoordinationGame(n, sets, edges, bonuses, palette)
    except GameError as exc:
        raise GameError(f"game: {exc}") from None


def emit_game(game: CoordinationGame) -> bytes:
    dump = json.dumps
    lines = ["{", f'  "nodes": {game.n},', f'  "colours": {dump(list(game.palette))},', '  "sets": {']
    set_lines = [f'    "{i}": {dump([game.colour_name(c) for c in game.colours(i)])}' for i in game.nodes()]
    lines.append(",\n".join(set_lines))
    lines.append("  },")
    edge_items = [dump([u, v] if w == 1 else [u, v, w]) for u, v, w in sorted(game.edges)]
    bonus_items = [dump([i, game.colour_name(c), b]) for i, c, b in sorted(game.bonus_items())]
    lines.append('  "edges": [' + _block(edge_items) + "]" + ("," if bonus_items else ""))
    if bonus_items:
        lines.append('  "bonuses": [' + _block(bonus_items) + "]")
    lines.append("}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def _block(items: list[str]) -> str:
    if not items:
        return ""
    return "\n    " + ",\n    ".join(items) + "\n  "


def load_game(path: str) -> CoordinationGame:
    with open(path, "rb") as fh:
        return parse_game(fh.read())


def save_game(game: CoordinationGame, path: str) -> None:
    with open(path, "wb") as fh:
        fh.write(emit_game(game))


def parse_strategy(game: CoordinationGame, text: str) -> JointStrategy:
    """Colour names separated by whitespace (or a JSON list of names)."""
    text = text.strip()
    names = json.loads(text) if text.startswith("[") else text.split()
    if len(names) != game.n:
        raise GameError(f"strategy lists {len(names)} colours for {game.n} nodes")
    return game.strategy(names)


def emit_strategy(game: CoordinationGame, s: JointStrategy) -> str:
    return " ".join(s.names(game)) + "\n"


def to_dot(game: CoordinationGame, s: JointStrategy | None = None) -> str:
    """DOT graph: nodes labelled with their colour sets, edges with weights."""
    lines = ["digraph game {"]
    for i in game.nodes():
        label = f"{i}\\n{{{','.join(game.colour_name(c) for c in game.colours(i))}}}"
        bonus = [f"{game.colour_name(c)}+{b}" for j, c, b in game.bonus_items() if j == i]
        if bonus:
            label += "\\n" + " ".join(bonus)
        if s is not None:
            label += f"\\n= {game.colour_name(s[i])}"
        lines.append(f'  {i} [label="{label}"];')
    for u, v, w in sorted(game.edges):
        lines.append(f'  {u} -> {v} [label="{w}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


@dataclass
class Classification:
    kind: str  # dag, simple_cycle, open_chain, two_colour, general
    supported: bool
    ne_bound: int | None
    se_bound: int | None
    detail: dict = field(default_factory=dict)

    def describe(self) -> str:
        parts = [self.kind]
        parts += [f"{k}={v}" for k, v in self.detail.items()]
        if not self.supported:
            parts.append("no guaranteed schedule")
        if self.ne_bound is not None:
            parts.append(f"NE path <= {self.ne_bound}")
        if self.se_bound is not None:
            parts.append(f"SE path <= {self.se_bound}")
        return ", ".join(parts)


def classify(game: CoordinationGame) -> Classification:
    """First matching class in the order dag, simple cycle, open chain, two colours."""
    n = game.n
    if is_dag(game):
        # a source may still move once to a bonus colour, hence n with bonuses
        bound = n if game.has_bonuses else n - 1
        return Classification("dag", True, bound, bound)
    if is_simple_cycle(game):
        view = classify_cycle(game)
        bound = view.bound
        supported = view.variant is not CycleVariant.UNSUPPORTED
        return Classification(
            "simple_cycle", supported, bound, None if bound is None else bound + 1, {"variant": view.variant.value}
        )
    try:
        dec = detect_chain(game)
    except NotAChain:
        dec = None
    if dec is not None:
        plain = game.is_unweighted and not game.has_bonuses
        v, m = dec.v, dec.m
        detail = {"m": m, "v": v}
        if not plain:
            detail["note"] = "weights or bonuses"
        return Classification(
            "open_chain", plain, 3 * v * m**3 if plain else None, 4 * v * m**4 if plain else None, detail
        )
    if game.l == 2:
        return Classification("two_colour", True, 2 * n, 2 * n)
    return Classification("general", False, None, None)
