"""Figures for localization reports."""

from __future__ import annotations

import os
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .automata import Generator  # noqa: E402


def plot_event_reduction(
    names: Sequence[str],
    state_counts: Sequence[int],
    event_counts: Sequence[int],
    rsup: Generator,
    rsup_events: int,
    path: str | os.PathLike,
) -> None:
    """Bar chart of controller state and event counts against the reduced supervisor.

    The dashed lines mark the reduced supervisor; bars below them are
    reductions.
    """
    fig, (ax_s, ax_e) = plt.subplots(1, 2, figsize=(8, 3.2), sharex=True)
    xs = range(len(names))
    panels = (
        (ax_s, state_counts, rsup.state_count, "states", "C0"),
        (ax_e, event_counts, rsup_events, "events", "C1"),
    )
    for ax, counts, ref, label, color in panels:
        ax.bar(xs, counts, color=color, width=0.6)
        ax.axhline(ref, color="k", ls="--", lw=1, label=f"RSUP ({ref})")
        for x, c in zip(xs, counts):
            ax.text(x, c, str(c), ha="center", va="bottom", fontsize=8)
        ax.set_ylabel(label)
        ax.set_xticks(list(xs))
        ax.set_xticklabels(names)
        ax.set_ylim(0, max([ref, *counts]) * 1.2 + 1)
        ax.legend(frameon=False, fontsize=8, loc="upper right")
    ax_s.set_title("local controller size", fontsize=9)
    ax_e.set_title("observed events", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
