"""Figure rendering for sweep reports."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def render_sweep_figure(rows, out_path, title: str = "", seed: int | None = None) -> None:
    """Plot lower bounds against total ancilla dimension and save to a file.

    Args:
        rows: sweep rows exposing ``n_total`` and ``lower_bound``.
        out_path: image file to write; format follows the extension.
        title: optional headline, e.g. the game name.
        seed: if given, recorded in the corner so the figure stays
            attributable to a reproducible run.
    """
    ns = [row.n_total for row in rows]
    values = [row.lower_bound for row in rows]
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    ax.plot(ns, values, marker="o", color="#2b6cb0", lw=1.4)
    ax.axhline(1.0, color="0.6", lw=0.8, ls="--")
    ax.set_xlabel("total ancilla dimension N")
    ax.set_ylabel("winning-probability lower bound")
    ax.set_xticks(ns)
    ax.grid(True, alpha=0.3)
    pad = max(1e-3, 0.08 * (max(values) - min(values) + 1e-12))
    ax.set_ylim(min(values) - pad, max(1.0 + pad / 2, max(values) + pad))
    if title:
        ax.set_title(title)
    if seed is not None:
        ax.annotate(f"seed {seed}", xy=(0.99, 0.02), xycoords="axes fraction",
                    ha="right", fontsize=7, color="0.4")
    fig.tight_layout()
    fig.savefig(out_path, dpi=160)
    plt.close(fig)
