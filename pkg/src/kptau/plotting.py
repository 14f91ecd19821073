"""Figures written next to CSV output (Agg backend, no display needed)."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def figure_path(csv_path: str | Path) -> Path:
    return Path(csv_path).with_suffix(".png")


def plot_field(xs: Sequence[float], ys: Sequence[float], ts: Sequence[float], u: np.ndarray, path: str | Path) -> Path:
    """Plot ``u[it, iy, ix]``: line plots per time when the y axis is a single point, else heatmaps."""
    u = np.asarray(u, dtype=float)
    path = Path(path)
    if len(ys) == 1:
        fig, ax = plt.subplots(figsize=(6, 4))
        for it, t in enumerate(ts):
            ax.plot(xs, u[it, 0], label=f"t3 = {t:g}")
        ax.set_xlabel("x")
        ax.set_ylabel("u")
        if len(ts) > 1:
            ax.legend(fontsize="small")
    else:
        shown = list(range(len(ts)))[:: max(1, len(ts) // 4)][:4]
        fig, axes = plt.subplots(1, len(shown), figsize=(4 * len(shown), 3.6), squeeze=False)
        for ax, it in zip(axes[0], shown):
            im = ax.pcolormesh(xs, ys, np.ma.masked_invalid(u[it]), shading="auto")
            ax.set_title(f"t3 = {ts[it]:g}")
            ax.set_xlabel("x")
            ax.set_ylabel("y")
            fig.colorbar(im, ax=ax)
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return path


def plot_coefficients(labels: Sequence[str], values: Sequence[complex], path: str | Path) -> Path:
    """Bar chart of ``|coefficient|`` per partition."""
    path = Path(path)
    mags = [abs(complex(v)) for v in values]
    fig, ax = plt.subplots(figsize=(max(4, 0.35 * len(labels) + 1), 3.6))
    ax.bar(range(len(mags)), mags)
    ax.set_xticks(range(len(mags)))
    ax.set_xticklabels(labels, rotation=90, fontsize="small")
    ax.set_ylabel("|coefficient|")
    if any(m > 0 for m in mags):
        ax.set_yscale("symlog", linthresh=max(min((m for m in mags if m > 0)), 1e-12))
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return path
