"""Random instance generators for tests, benchmarks and the CLI."""

from __future__ import annotations

import random
import string

from .model import CoordinationGame, as_rng

RngLike = random.Random | int | None


def palette_names(l: int) -> list[str]:
    if l <= 26:
        return list(string.ascii_lowercase[:l])
    return [f"c{k}" for k in range(l)]


def random_sets(rng: random.Random, n: int, l: int, min_size: int = 1) -> list[list[int]]:
    out = []
    for _ in range(n):
        size = rng.randint(min(min_size, l), l)
        out.append(sorted(rng.sample(range(l), size)))
    return out


def _relabel(rng: random.Random, n: int) -> list[int]:
    """Random permutation of 1..n, indexed from 1 (entry 0 unused)."""
    perm = list(range(1, n + 1))
    rng.shuffle(perm)
    return [0] + perm


def random_cycle_game(
    rng: RngLike,
    n: int,
    l: int,
    variant: str = "any",
    *,
    max_weight: int = 5,
    max_bonus: int = 3,
    shuffle: bool = True,
) -> CoordinationGame:
    """Random weighted cycle whose natural variant is ``variant``.

    ``variant`` is ``le1-bonus``, ``le1-weight``, ``2-bonus``, ``2-weight``,
    ``unsupported`` or ``any``. Bonuses are placed on colours of the node's
    own set so that bonus-node counts are exact.
    """
    rng = as_rng(rng)
    if variant == "any":
        variant = rng.choice(["le1-bonus", "le1-weight", "2-bonus", "2-weight"])
    max_weight = max(max_weight, 2)
    max_bonus = max(max_bonus, 1)
    if variant == "le1-bonus":
        n_bonus, n_heavy = rng.randint(0, 1), rng.randint(0, n)
    elif variant == "le1-weight":
        n_bonus, n_heavy = rng.randint(2, n), rng.randint(0, 1)
    elif variant == "2-bonus":
        n_bonus, n_heavy = 2, rng.randint(2, n)
    elif variant == "2-weight":
        n_bonus, n_heavy = rng.randint(3, n), 2
    elif variant == "unsupported":
        n_bonus, n_heavy = rng.randint(3, n), rng.randint(3, n)
    else:
        raise ValueError(f"unknown cycle variant {variant!r}")
    if n_bonus > n or n_heavy > n:
        raise ValueError(f"variant {variant} needs a larger cycle than n={n}")

    label = _relabel(rng, n) if shuffle else list(range(n + 1))
    sets = random_sets(rng, n, l)
    heavy = set(rng.sample(range(1, n + 1), n_heavy))
    edges = []
    for i in range(1, n + 1):
        w = rng.randint(2, max_weight) if i in heavy else 1
        edges.append((label[i], label[i % n + 1], w))
    bonuses = {}
    for i in rng.sample(range(1, n + 1), n_bonus):
        colours = sets[i - 1]
        for c in rng.sample(colours, rng.randint(1, len(colours))):
            bonuses[(label[i], c)] = rng.randint(1, max_bonus)
    node_sets = {label[i]: sets[i - 1] for i in range(1, n + 1)}
    return CoordinationGame(n, node_sets, edges, bonuses, palette_names(l))


def random_chain_game(
    rng: RngLike,
    m: int,
    lengths: list[int] | tuple[int, int],
    l: int,
    *,
    shuffle: bool = True,
    full_sets: bool = False,
) -> CoordinationGame:
    """Unweighted, bonus-free open chain of ``m`` cycles.

    ``lengths`` is either the list of cycle lengths or an inclusive range
    ``(lo, hi)`` to sample from. The down-link position in each cycle is
    random.
    """
    rng = as_rng(rng)
    if isinstance(lengths, tuple):
        lengths = [rng.randint(lengths[0], lengths[1]) for _ in range(m)]
    if len(lengths) != m or min(lengths) < 3:
        raise ValueError("need m cycle lengths, each at least 3")
    cycles: list[list[int]] = []
    next_id = 1
    for j in range(m):
        v = lengths[j]
        if j == 0:
            cyc = list(range(next_id, next_id + v))
            next_id += v
        else:
            k = rng.randint(2, v)  # position of the down-link, 1-based
            cyc = []
            for pos in range(1, v + 1):
                if pos == k:
                    cyc.append(cycles[-1][0])
                else:
                    cyc.append(next_id)
                    next_id += 1
        cycles.append(cyc)
    n = next_id - 1
    label = _relabel(rng, n) if shuffle else list(range(n + 1))
    edges = []
    for cyc in cycles:
        for k in range(len(cyc)):
            edges.append((label[cyc[k]], label[cyc[(k + 1) % len(cyc)]]))
    if full_sets:
        sets = {i: list(range(l)) for i in range(1, n + 1)}
    else:
        raw = random_sets(rng, n, l)
        sets = {label[i]: raw[i - 1] for i in range(1, n + 1)}
    return CoordinationGame(n, sets, edges, palette=palette_names(l))


def random_dag_game(
    rng: RngLike,
    n: int,
    l: int,
    *,
    p: float = 0.4,
    max_weight: int = 3,
    max_bonus: int = 2,
    bonus_prob: float = 0.3,
) -> CoordinationGame:
    rng = as_rng(rng)
    label = _relabel(rng, n)
    edges = []
    for a in range(1, n + 1):
        for b in range(a + 1, n + 1):
            if rng.random() < p:
                edges.append((label[a], label[b], rng.randint(1, max_weight)))
    sets = random_sets(rng, n, l)
    bonuses = {}
    for i in range(1, n + 1):
        for c in sets[i - 1]:
            if max_bonus > 0 and rng.random() < bonus_prob:
                bonuses[(label[i], c)] = rng.randint(1, max_bonus)
    return CoordinationGame(
        n, {label[i]: sets[i - 1] for i in range(1, n + 1)}, edges, bonuses, palette_names(l)
    )


def random_game(
    rng: RngLike,
    n: int,
    l: int,
    *,
    p: float = 0.3,
    max_weight: int = 3,
    max_bonus: int = 2,
    bonus_prob: float = 0.2,
    min_set: int = 1,
) -> CoordinationGame:
    """Random digraph (both directions allowed) with random sets and bonuses."""
    rng = as_rng(rng)
    edges = []
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            if a != b and rng.random() < p:
                edges.append((a, b, rng.randint(1, max_weight)))
    sets = random_sets(rng, n, l, min_set)
    bonuses = {}
    for i in range(1, n + 1):
        for c in sets[i - 1]:
            if max_bonus > 0 and rng.random() < bonus_prob:
                bonuses[(i, c)] = rng.randint(1, max_bonus)
    return CoordinationGame(n, sets, edges, bonuses, palette_names(l))


def random_two_colour_game(
    rng: RngLike,
    n: int,
    *,
    p: float = 0.3,
    max_weight: int = 3,
    max_bonus: int = 2,
    bonus_prob: float = 0.2,
    singleton_prob: float = 0.15,
) -> CoordinationGame:
    rng = as_rng(rng)
    game = random_game(rng, n, 2, p=p, max_weight=max_weight, max_bonus=max_bonus,
                       bonus_prob=bonus_prob, min_set=2)
    sets = {}
    for i in game.nodes():
        sets[i] = [rng.randint(0, 1)] if rng.random() < singleton_prob else [0, 1]
    bonuses = {(i, c): v for i, c, v in game.bonus_items() if c in sets[i]}
    return CoordinationGame(n, sets, game.edges, bonuses, game.palette)


def sparse_two_colour_game(rng: RngLike, n: int, m: int) -> CoordinationGame:
    """Two-colour game with ``m`` random unit edges, for scaling runs."""
    rng = as_rng(rng)
    pairs: set[tuple[int, int]] = set()
    m = min(m, n * (n - 1))
    while len(pairs) < m:
        a, b = rng.randint(1, n), rng.randint(1, n)
        if a != b:
            pairs.add((a, b))
    bonuses = {(i, rng.randint(0, 1)): 1 for i in range(1, n + 1) if rng.random() < 0.2}
    return CoordinationGame(n, [[0, 1]] * n, sorted(pairs), bonuses, ["a", "b"])
