"""Figures for the report paths of the CLI (written to files, never shown)."""

from __future__ import annotations

from pathlib import Path
from typing import Dict, Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

FIGSIZE = (6.0, 4.0)


def _finish(fig, ax, path, xlabel: str, ylabel: str, legend: bool = True) -> Path:
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(alpha=0.3)
    if legend:
        ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_size_distribution(histograms: Mapping[str, Dict[int, int]], path) -> Path:
    """One curve per pattern set: number of patterns per edge count."""
    fig, ax = plt.subplots(figsize=FIGSIZE)
    for name, hist in histograms.items():
        xs = sorted(hist)
        ax.plot(xs, [hist[x] for x in xs], marker="o", ms=3, label=name)
    return _finish(fig, ax, path, "pattern size (edges)", "number of patterns")


def plot_selection_rate(taus: Sequence[float], rates: Sequence[float], path) -> Path:
    fig, ax = plt.subplots(figsize=FIGSIZE)
    ax.plot(taus, rates, marker="s", color="tab:blue")
    ax.set_ylim(0, max(100, max(rates, default=0)) * 1.05)
    return _finish(fig, ax, path, "substitution threshold (%)", "selection rate (%)",
                   legend=False)


def plot_accuracy(taus: Sequence[float], acc: Sequence[float], baseline: float, path) -> Path:
    fig, ax = plt.subplots(figsize=FIGSIZE)
    ax.plot(taus, acc, marker="o", color="tab:blue", label="selected patterns")
    ax.axhline(baseline, color="tab:red", label="all frequent patterns")
    ax.set_ylim(0, 1.02)
    return _finish(fig, ax, path, "substitution threshold (%)", "accuracy (naive Bayes)")


def plot_runtime(sizes: Sequence[int], seconds: Mapping[str, Sequence[float]], path) -> Path:
    fig, ax = plt.subplots(figsize=FIGSIZE)
    for name, ys in seconds.items():
        ax.plot(sizes, ys, marker="o", ms=3, label=name)
    return _finish(fig, ax, path, "number of patterns", "selection time (s)")
