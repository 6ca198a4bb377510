"""Figure rendering for reports and benchmark runs.

Everything draws through the Agg backend and saves straight to files; no
interactive windows are ever opened.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "PATTERN_COLORS",
    "save_radar_figure",
    "save_rank_sweep_figure",
    "save_score_comparison_figure",
]

# 12 distinguishable hues, cycled beyond twelve patterns
PATTERN_COLORS = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#aec7e8", "#ffbb78",
]


def pattern_color(index: int) -> str:
    return PATTERN_COLORS[index % len(PATTERN_COLORS)]


def save_radar_figure(
    medoids: Sequence[Mapping], mode_names: Sequence[str],
    mode_sizes: Sequence[int], path,
) -> None:
    """One radar polygon per medoid signature.

    ``medoids`` are mappings with ``ids`` (1-based semantic IDs) and
    ``site_count``; each axis value is the ID scaled by its mode size.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    n_axes = len(mode_names)
    count = max(len(medoids), 1)
    cols = min(count, 4)
    rows_n = math.ceil(count / cols)
    angles = np.linspace(0.0, 2.0 * np.pi, n_axes, endpoint=False)
    fig, axes = plt.subplots(
        rows_n, cols, figsize=(3.2 * cols, 3.2 * rows_n),
        subplot_kw={"projection": "polar"}, squeeze=False,
    )
    for i, ax in enumerate(axes.ravel()):
        if i >= len(medoids):
            ax.set_visible(False)
            continue
        med = medoids[i]
        values = [
            med["ids"][k] / mode_sizes[k] for k in range(n_axes)
        ]
        closed_angles = np.concatenate([angles, angles[:1]])
        closed_values = values + values[:1]
        color = pattern_color(i)
        ax.plot(closed_angles, closed_values, color=color, linewidth=1.5)
        ax.fill(closed_angles, closed_values, color=color, alpha=0.25)
        ax.set_xticks(angles)
        ax.set_xticklabels(mode_names, fontsize=6)
        ax.set_ylim(0.0, 1.0)
        ax.set_yticklabels([])
        ax.set_title(
            f"pattern {i} ({med.get('site_count', '?')} sites)", fontsize=8
        )
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_rank_sweep_figure(curves: Mapping[int, Sequence[float]], path) -> None:
    """Mean recovery error per rank, one line per rank across seeds."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(6, 4))
    for i, (rank, errors) in enumerate(sorted(curves.items())):
        finite = [e if math.isfinite(e) else np.nan for e in errors]
        ax.plot(
            range(len(finite)), finite, marker="o",
            color=pattern_color(i), label=f"rank {rank}",
        )
    ax.set_xlabel("seed index")
    ax.set_ylabel("mean recovery error (EMD)")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_score_comparison_figure(
    scores_by_method: Mapping[str, Mapping[str, float]], path
) -> None:
    """Grouped bars of the four agreement scores per method."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    metrics = ["fmi", "ari", "v_measure", "mutual_info_normalized"]
    methods = list(scores_by_method)
    width = 0.8 / max(len(methods), 1)
    x = np.arange(len(metrics))
    fig, ax = plt.subplots(figsize=(7, 4))
    for i, method in enumerate(methods):
        vals = [scores_by_method[method][m] for m in metrics]
        ax.bar(x + i * width, vals, width, color=pattern_color(i), label=method)
    ax.set_xticks(x + width * (len(methods) - 1) / 2)
    ax.set_xticklabels(metrics)
    ax.set_ylim(0.0, 1.05)
    ax.legend()
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_map_figure(site_rows: Sequence[Mapping], path) -> None:
    """Scatter of sites colored by assigned pattern (lon/lat plane)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(6, 6))
    patterns = sorted({row["pattern"] for row in site_rows})
    for p in patterns:
        lons = [r["lon"] for r in site_rows if r["pattern"] == p]
        lats = [r["lat"] for r in site_rows if r["pattern"] == p]
        ax.scatter(lons, lats, s=18, color=pattern_color(p), label=f"pattern {p}")
    ax.set_xlabel("longitude")
    ax.set_ylabel("latitude")
    ax.legend(fontsize=7)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
