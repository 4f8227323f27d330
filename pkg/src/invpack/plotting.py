"""Matplotlib figures for verification reports and packings (written to files, Agg backend)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .harness import TrialReport  # noqa: E402

STATUS_COLORS = {"pass": "#2e8b57", "vacuous": "#b0b0b0", "boundary": "#e0a000",
                 "violation": "#c0392b", "skipped": "#6a5acd"}


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    # fixed metadata keeps the bytes stable across runs
    fig.savefig(path, dpi=100, metadata={"Software": None})
    plt.close(fig)
    return path


def plot_outcomes(reports: list[TrialReport], path) -> Path:
    """Stacked bar of trial outcomes per suite."""
    fig, ax = plt.subplots(figsize=(7, 4))
    names = [f"{r.suite}\n{r.params.get('regime', '')}".strip() for r in reports]
    x = np.arange(len(reports))
    bottom = np.zeros(len(reports))
    for status in STATUS_COLORS:
        if status == "pass":
            vals = [r.hypothesis_count - r.violations - r.boundary for r in reports]
        else:
            vals = [getattr(r, {"vacuous": "vacuous", "boundary": "boundary",
                                "violation": "violations", "skipped": "skipped"}[status]) for r in reports]
        vals = np.asarray(vals, float)
        ax.bar(x, vals, bottom=bottom, color=STATUS_COLORS[status], label=status)
        bottom += vals
    ax.set_xticks(x)
    ax.set_xticklabels(names, fontsize=8)
    ax.set_ylabel("trials")
    ax.legend(fontsize=8, frameon=False)
    ax.set_title("trial outcomes")
    fig.tight_layout()
    return _save(fig, path)


def plot_margins(report: TrialReport, path) -> Path:
    """Histogram of conclusion margins (positive means the strict conclusion held)."""
    fig, ax = plt.subplots(figsize=(6, 4))
    m = np.asarray(report.margins, float)
    m = m[np.isfinite(m)]
    if len(m):
        pos = m[m > 0]
        if len(pos):
            ax.hist(np.log10(pos), bins=30, color=STATUS_COLORS["pass"])
        ax.set_xlabel("log10 margin")
        if len(m) > len(pos):
            ax.text(0.02, 0.95, f"{len(m) - len(pos)} non-positive margins", transform=ax.transAxes,
                    color=STATUS_COLORS["violation"], va="top")
    else:
        ax.text(0.5, 0.5, "no hypothesis-satisfying trials", ha="center", transform=ax.transAxes)
    ax.set_ylabel("count")
    ax.set_title(f"{report.suite} {report.params.get('regime', '')}".strip())
    fig.tight_layout()
    return _save(fig, path)


def plot_packing(circles, edges, positions, path, title: str = "") -> Path:
    """Draw Euclidean circles and straight edges inside the unit disk."""
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.add_patch(plt.Circle((0, 0), 1.0, fill=False, color="black", lw=1.5))
    for i, j in edges:
        a, b = positions[i], positions[j]
        ax.plot([a.real, b.real], [a.imag, b.imag], color="#555555", lw=0.6)
    for C in circles:
        color = "#1f3a93" if C.inside_disk() else "#c0392b"
        patch = plt.Circle((C.center.real, C.center.imag), C.radius, fill=False, color=color, lw=1)
        ax.add_patch(patch)
        patch.set_clip_path(plt.Circle((0, 0), 1.0, transform=ax.transData))
    ax.set_xlim(-1.05, 1.05)
    ax.set_ylim(-1.05, 1.05)
    ax.set_aspect("equal")
    ax.axis("off")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)
