"""Canned survival-curve sweeps emitted as plot-ready CSV tables.

Four report commands reproduce the qualitative comparisons the model is
built for: attacker-count sweeps (fig5), detection-time sweeps for a
fixed attacker count (fig6), growth-rate sweeps under logistic attacker
growth (fig8), and detection-time sweeps under logistic growth (fig9).
Parameter grids the sweeps need beyond the core model are toolkit
defaults and are restated in each table's comment header.
"""

from __future__ import annotations

import os

from .analytic import DetectionParams, LogisticGrowth, StaticGrowth, survival_curve
from .reporting import Table, write_csv

__all__ = ["FIGURES", "build_figure", "run_figure"]

V_TOTAL = 20
T_GRID = tuple(float(t) for t in range(2, 101))
N_SWEEP = tuple(range(1, 20))
TD_SWEEP = (0.05, 0.1, 0.5, 1.0, 2.0, 5.0)
K_SWEEP = (0.1, 0.3, 0.5, 1.0)
LOGISTIC_N0 = 2.0
LOGISTIC_MU = 15.0
FIG9_K = 0.5

FIGURES = ("fig5", "fig6", "fig8", "fig9")


def _columns(mode_growth_detection: list[tuple[str, object, DetectionParams]]) -> list[tuple[float, ...]]:
    curves = [
        survival_curve(mode, growth, V_TOTAL, detection, T_GRID).probabilities
        for mode, growth, detection in mode_growth_detection
    ]
    return [
        (T_GRID[i], *(curve[i] for curve in curves)) for i in range(len(T_GRID))
    ]


def _grid_comment() -> str:
    return "time grid: t in {2..100} step 1"


def build_figure(which: str) -> Table:
    """Assemble one of the canned sweep tables."""
    off = DetectionParams.off()
    if which == "fig5":
        specs = []
        header = ["t"]
        for n in N_SWEEP:
            growth = StaticGrowth(n=float(n))
            specs += [("static", growth, off), ("mobile", growth, off)]
            header += [f"p_static_N{n}", f"p_mobile_N{n}"]
        comments = (
            "figure: fig5",
            "survival of a static vs mobile container across attacker counts",
            f"params: V={V_TOTAL}, N in {{1..19}}, detection disabled, {_grid_comment()}",
        )
    elif which == "fig6":
        growth = StaticGrowth(n=7.0)
        specs = [("mobile", growth, DetectionParams.at(td)) for td in TD_SWEEP]
        header = ["t"] + [f"p_td{td:g}" for td in TD_SWEEP]
        comments = (
            "figure: fig6",
            "mobile-container survival at N=7 across detection times",
            f"params: V={V_TOTAL}, N=7, t_d in {{{', '.join(format(td, 'g') for td in TD_SWEEP)}}},"
            f" {_grid_comment()}",
            "note: the detection-time grid is a toolkit default",
        )
    elif which == "fig8":
        specs = []
        header = ["t"]
        for k in K_SWEEP:
            growth = LogisticGrowth(n0=LOGISTIC_N0, k=k, mu=LOGISTIC_MU)
            specs += [("static", growth, off), ("mobile", growth, off)]
            header += [f"p_static_k{k:g}", f"p_mobile_k{k:g}"]
        comments = (
            "figure: fig8",
            "survival under logistic attacker growth across growth rates",
            f"params: V={V_TOTAL}, n0={LOGISTIC_N0:g}, mu={LOGISTIC_MU:g},"
            f" k in {{{', '.join(format(k, 'g') for k in K_SWEEP)}}}, detection disabled,"
            f" {_grid_comment()}",
            "note: n0, mu and the k grid are toolkit defaults",
        )
    elif which == "fig9":
        growth = LogisticGrowth(n0=LOGISTIC_N0, k=FIG9_K, mu=LOGISTIC_MU)
        specs = [("mobile", growth, DetectionParams.at(td)) for td in TD_SWEEP]
        header = ["t"] + [f"p_td{td:g}" for td in TD_SWEEP]
        comments = (
            "figure: fig9",
            "mobile-container survival under logistic attacker growth across detection times",
            f"params: V={V_TOTAL}, n0={LOGISTIC_N0:g}, mu={LOGISTIC_MU:g}, k={FIG9_K:g},"
            f" t_d in {{{', '.join(format(td, 'g') for td in TD_SWEEP)}}}, {_grid_comment()}",
            "note: n0, mu, k and the detection-time grid are toolkit defaults",
        )
    else:
        raise ValueError(f"unknown figure {which!r}; choose one of {FIGURES}")
    return Table(comments=comments, header=tuple(header), rows=tuple(_columns(specs)))


def run_figure(which: str, destination: str | os.PathLike) -> None:
    """Build a figure table and write it as CSV."""
    write_csv(build_figure(which), destination)
