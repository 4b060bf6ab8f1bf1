"""Figure rendering for the report paths.

Simulation reports get one panel per metric (error rates with dashed
target lines, power), grouped bars per method with Monte-Carlo error
bars; level-metric reports get a single grouped-bar panel.  Figures are
written next to the delimited output by the CLI.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .metrics import LevelReport
from .simulate import SimulationReport

_COLORS = plt.rcParams["axes.prop_cycle"].by_key()["color"]


def simulation_figure(report: SimulationReport):
    """Grouped bars of FDR / sFDR / power by level, one series per method."""
    metrics = ("fdr", "sfdr", "power")
    titles = {
        "fdr": "level-restricted FDR",
        "sfdr": "selective FDR",
        "power": "power",
    }
    levels = list(range(1, report.levels + 1))
    n_methods = len(report.methods)
    width = 0.8 / max(n_methods, 1)

    fig, axes = plt.subplots(
        1, len(metrics), figsize=(4.0 * len(metrics), 3.4), constrained_layout=True
    )
    for ax, metric in zip(np.atleast_1d(axes), metrics):
        for m_idx, method in enumerate(report.methods):
            xs = [lv + (m_idx - (n_methods - 1) / 2) * width for lv in levels]
            means = [report.mean(method, lv, metric) for lv in levels]
            ses = [report.se(method, lv, metric) for lv in levels]
            ax.bar(
                xs, means, width=width * 0.92, yerr=ses, capsize=2,
                color=_COLORS[m_idx % len(_COLORS)],
                label=method if metric == metrics[0] else None,
            )
        if metric != "power":
            for lv, q in zip(levels, report.q_levels):
                ax.hlines(
                    q, lv - 0.45, lv + 0.45,
                    colors="black", linestyles="dashed", linewidth=1,
                )
        ax.set_title(titles[metric])
        ax.set_xlabel("level")
        ax.set_xticks(levels)
        ax.set_ylim(bottom=0)
    fig.legend(loc="outside lower center", ncols=max(n_methods, 1))
    fig.suptitle(
        f"{report.name}: mu={report.mu:g}, {report.reps} replicates", fontsize=11
    )
    return fig


def level_metrics_figure(reports: list[LevelReport]):
    """Bars of realized FDP / sFDP / power per level for one pattern."""
    levels = [r.level for r in reports]
    series = {
        "fdp": [float(r.fdp) for r in reports],
        "sfdp": [float(r.sfdp) for r in reports],
        "power": [float(r.power) for r in reports],
    }
    width = 0.8 / len(series)
    fig, ax = plt.subplots(figsize=(5.0, 3.4), constrained_layout=True)
    for idx, (name, values) in enumerate(series.items()):
        xs = [lv + (idx - 1) * width for lv in levels]
        ax.bar(xs, values, width=width * 0.92, label=name,
               color=_COLORS[idx % len(_COLORS)])
    ax.set_xlabel("level")
    ax.set_xticks(levels)
    ax.set_ylim(0, 1.05)
    ax.legend()
    return fig


def save_figure(fig, path) -> None:
    fig.savefig(path, dpi=150)
    plt.close(fig)
