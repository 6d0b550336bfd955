"""Matplotlib rendering of report tables, saved next to the CSV output."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .reporting import Table

__all__ = ["render_table", "plot_path_for"]

MAX_LEGEND_SERIES = 12
CI_COLUMN = "ci_half_width"


def plot_path_for(csv_path: str | os.PathLike) -> str:
    root, _ = os.path.splitext(os.fspath(csv_path))
    return f"{root}.png"


def render_table(
    table: Table,
    destination: str | os.PathLike,
    *,
    y_label: str = "survival probability",
    title: str | None = None,
) -> None:
    """Plot every data column of a table against its first column.

    A ci_half_width column is drawn as a shaded band around the series
    before it instead of as its own line.
    """
    x = [row[0] for row in table.rows]
    fig, ax = plt.subplots(figsize=(7.0, 4.4))
    plotted = 0
    for col in range(1, len(table.header)):
        name = table.header[col]
        values = [row[col] for row in table.rows]
        if name == CI_COLUMN and plotted:
            prev = [row[col - 1] for row in table.rows]
            ax.fill_between(
                x,
                [p - w for p, w in zip(prev, values)],
                [p + w for p, w in zip(prev, values)],
                alpha=0.25,
                linewidth=0,
            )
            continue
        ax.plot(x, values, label=name, linewidth=1.4)
        plotted += 1
    ax.set_xlabel(table.header[0])
    ax.set_ylabel(y_label)
    if title is None and table.comments:
        title = table.comments[0]
    if title:
        ax.set_title(title)
    if 0 < plotted <= MAX_LEGEND_SERIES:
        ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(destination, dpi=150)
    plt.close(fig)
