"""Matplotlib figures for the CLI. Uses the non-interactive Agg backend."""

from __future__ import annotations

from collections import defaultdict
from collections.abc import Iterable, Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def plot_bench(rows: Iterable[Mapping[str, object]], path: str, title: str = "") -> None:
    """Worst path length and its bound against instance size, one panel."""
    worst: dict[int, int] = defaultdict(int)
    bound: dict[int, int] = {}
    for row in rows:
        size = int(row["size"])
        worst[size] = max(worst[size], int(row["steps"]))
        bound[size] = max(bound.get(size, 0), int(row["bound"]))
    sizes = sorted(worst)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(sizes, [worst[k] for k in sizes], marker="o", label="longest path")
    ax.plot(sizes, [bound[k] for k in sizes], linestyle="--", label="bound")
    ax.set_xlabel("size")
    ax.set_ylabel("deviations")
    if title:
        ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_progress(mu_values: Sequence[Sequence[int]], path: str) -> None:
    """Progress measure components across chain-solver iterations."""
    labels = ("guard", "flag", "prefix length", "-NBR")
    fig, ax = plt.subplots(figsize=(5, 3.5))
    xs = list(range(len(mu_values)))
    for k, label in enumerate(labels):
        ax.step(xs, [mu[k] for mu in mu_values], where="post", label=label)
    ax.set_xlabel("iteration")
    ax.set_ylabel("value")
    ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
