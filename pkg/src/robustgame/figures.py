"""Matplotlib renderings for experiment reports.

Figures are written next to the delimited output; the CSV stays the primary
artifact, so every renderer degrades to "no figure" when its data is missing.
"""
from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_gap_decay_figure(medians: dict[int, float], slope: float | None,
                          path: Path) -> bool:
    points = {m: g for m, g in medians.items() if g > 0}
    if len(points) < 2:
        return False
    ms = np.array(sorted(points), dtype=np.float64)
    gaps = np.array([points[int(m)] for m in ms])
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.loglog(ms, gaps, "o-", label="median gap")
    if slope is not None:
        anchor = gaps[0] / ms[0] ** slope
        ax.loglog(ms, anchor * ms**slope, "--", label=f"fit slope {slope:.2f}")
    ax.loglog(ms, gaps[0] * np.sqrt(ms[0] / ms), ":", color="gray",
              label="reference slope -1/2")
    ax.set_xlabel("sample size m")
    ax.set_ylabel("median |true risk - empirical risk|")
    ax.set_title("Generalization gap decay")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return True


def save_optimality_figure(rows, epsilon: float, path: Path) -> bool:
    solved = [r for r in rows if not r.error and math.isfinite(r.value)]
    if not solved:
        return False
    ms = np.array([r.sample_size for r in solved], dtype=np.float64)
    jitter = np.linspace(-0.06, 0.06, len(solved))
    learner = np.array([r.learner_guarantee - r.value for r in solved])
    adversary = np.array([r.value - r.adversary_guarantee for r in solved])
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.scatter(ms * (1 + jitter), learner, s=18, label="learner excess over value")
    ax.scatter(ms * (1 - jitter), adversary, s=18, marker="x",
               label="value excess over adversary")
    ax.axhline(epsilon, color="red", linestyle="--", label=f"epsilon = {epsilon}")
    ax.axhline(0.0, color="gray", linewidth=0.8)
    ax.set_xscale("log")
    ax.set_xlabel("sample size m")
    ax.set_ylabel("optimality gap")
    ax.set_title("Strategy optimality against the exact game value")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return True


def render_experiment_figures(rows, summary: dict, out_dir: Path) -> list[Path]:
    out_dir = Path(out_dir)
    written: list[Path] = []
    medians = {
        int(m): g for m, g in summary["gap_decay"]["median_gap_by_m"].items()
    }
    slope = summary["gap_decay"]["slope"]
    gap_path = out_dir / "gap_decay.png"
    if save_gap_decay_figure(medians, slope, gap_path):
        written.append(gap_path)
    epsilon = summary["config"]["epsilon"]
    opt_path = out_dir / "optimality_gaps.png"
    if save_optimality_figure(rows, epsilon, opt_path):
        written.append(opt_path)
    return written
