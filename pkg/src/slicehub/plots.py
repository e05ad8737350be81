"""Render experiment reports as figures next to their CSV output."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .evalharness import ExperimentReport


def plot_reports(
    reports: list[ExperimentReport],
    path: str | Path,
    title: str,
    xlabel: str = "condition",
) -> Path:
    """Line plot of the time and material error trends; returns the path."""
    path = Path(path)
    conditions = [r.condition for r in reports]
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.plot(conditions, [r.mean_relative_error_time_pct for r in reports], "o-", label="print time")
    ax.plot(
        conditions,
        [r.mean_relative_error_material_pct for r in reports],
        "s--",
        label="material",
    )
    ax.set_xlabel(xlabel)
    ax.set_ylabel("mean relative error (%)")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
