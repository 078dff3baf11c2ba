"""Figure rendering for the CLI report paths.

Every plot lands next to the delimited data it draws, so an output
directory is self-contained: CSV for downstream analysis, PNG for eyes.
"""
from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .correlations import SweepRow  # noqa: E402


def save_ccdf_figure(
    path: str | Path,
    curves: Sequence[tuple[str, "np.ndarray", "np.ndarray"]],
    title: str = "",
    overlays: Sequence[tuple[str, "np.ndarray", "np.ndarray"]] = (),
) -> None:
    """Log-log CCDF staircases; ``curves`` are (label, values, P_>) triples."""
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    for label, values, p_gt in curves:
        mask = p_gt > 0
        ax.loglog(values[mask], p_gt[mask], drawstyle="steps-post", lw=1.2, label=label)
    for label, values, p_gt in overlays:
        ax.loglog(values, p_gt, "--", lw=1.0, label=label)
    ax.set_xlabel("normalized wealth")
    ax.set_ylabel(r"$P_>(w)$")
    if title:
        ax.set_title(title)
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.25)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_correlation_figure(path: str | Path, rows: Sequence[SweepRow], title: str = "") -> None:
    """Three panels (r_degree, r_wealth, r_degree-wealth) against M/N."""
    fig, axes = plt.subplots(1, 3, figsize=(10.5, 3.4), sharex=True)
    panels = [
        ("r_degree", lambda r: (r.r_degree, r.se_degree)),
        ("r_wealth", lambda r: (r.r_wealth, r.se_wealth)),
        ("r_degree-wealth", lambda r: (r.r_degree_wealth, r.se_degree_wealth)),
    ]
    for ax, (label, pick) in zip(axes, panels):
        xs, ys, es = [], [], []
        for row in rows:
            val, se = pick(row)
            if val is None:
                continue
            xs.append(row.m_over_n)
            ys.append(val)
            es.append(se if se is not None else 0.0)
        ax.errorbar(xs, ys, yerr=es, marker="o", ms=4, lw=1.0, capsize=2)
        ax.set_xscale("log")
        ax.axhline(0.0, color="gray", lw=0.6)
        ax.set_xlabel("M/N")
        ax.set_title(label, fontsize=10)
        ax.grid(True, alpha=0.25)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
