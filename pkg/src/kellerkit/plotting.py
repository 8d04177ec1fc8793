"""Figures for the report commands.

Rendering uses the Agg backend with fixed sizes and no timestamp metadata,
so a given table always produces the same PNG bytes.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

_RC = {
    "font.size": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.dpi": 120,
    "svg.hashsalt": "kellerkit",
}


def _save(fig, path):
    fmt = str(path).rsplit(".", 1)[-1].lower()
    meta = {"Software": None} if fmt == "png" else {}
    if fmt == "pdf":
        meta = {"Creator": None, "Producer": None, "CreationDate": None}
    fig.savefig(path, metadata=meta)
    plt.close(fig)


def plot_win_rates(rows, path, n: int):
    """Grouped bars: win rate per chooser, one bar per adversary."""
    choosers = list(dict.fromkeys(r["chooser"] for r in rows))
    adversaries = list(dict.fromkeys(r["adversary"] for r in rows))
    rate = {(r["chooser"], r["adversary"]): r["wins"] / r["trials"] if r["trials"] else 0.0
            for r in rows}
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(5.5, 3.2))
        width = 0.8 / max(len(adversaries), 1)
        for a_idx, adv in enumerate(adversaries):
            xs = [c_idx + (a_idx - (len(adversaries) - 1) / 2) * width for c_idx in range(len(choosers))]
            ax.bar(xs, [rate[(c, adv)] for c in choosers], width, label=f"vs {adv}")
        ax.set_xticks(range(len(choosers)))
        ax.set_xticklabels(choosers)
        ax.set_ylim(0, 1.05)
        ax.set_ylabel("chooser win rate")
        ax.set_title(f"set-picking game, n = {n}")
        ax.legend(frameon=False, fontsize=8)
        fig.tight_layout()
        _save(fig, path)


def plot_leaf_survey(records, path):
    """Leaf count against the bound n for generated posets, one panel per n."""
    ns = sorted({r["n"] for r in records})
    with plt.rc_context(_RC):
        fig, axes = plt.subplots(1, len(ns), figsize=(3.0 * len(ns), 3.0), squeeze=False)
        for ax, n in zip(axes[0], ns):
            counts = [r["leaves"] for r in records if r["n"] == n]
            lo, hi = min(counts), max(counts)
            ax.hist(counts, bins=range(lo, hi + 2), align="left", color="0.55")
            ax.axvline(n, color="C3", linestyle="--", linewidth=1, label=f"bound {n}")
            ax.set_xlabel("leaves")
            ax.set_title(f"B_{n}")
            ax.legend(frameon=False, fontsize=8)
        axes[0][0].set_ylabel("posets")
        fig.tight_layout()
        _save(fig, path)
