"""Benchmark figures rendered next to the JSONL report."""
from __future__ import annotations

from pathlib import Path
from typing import List, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .harness import CHANGED, GRANULARITIES, RESOLVED, TIMEOUT, UNCHANGED, ScenarioReport  # noqa: E402


def _stem(report_path) -> Path:
    p = Path(report_path)
    return p.with_name(p.stem)


def plot_totals(reports: Sequence[ScenarioReport], out: Path) -> Path:
    tools = list(dict.fromkeys(r.tool for r in reports))
    fig, axes = plt.subplots(1, len(GRANULARITIES), figsize=(10, 3.2))
    for ax, (i, g) in zip(axes, enumerate(GRANULARITIES)):
        totals = [sum(r.metrics.as_tuple()[i] for r in reports if r.tool == t) for t in tools]
        ax.bar(tools, totals, color=["#888888", "#3a7dc9", "#d98c2b"][:len(tools)])
        ax.set_title(f"conflicting {g}")
    fig.tight_layout()
    fig.savefig(out)
    plt.close(fig)
    return out


def plot_status(reports: Sequence[ScenarioReport], out: Path) -> Path:
    statuses = (RESOLVED, CHANGED, UNCHANGED, TIMEOUT)
    cand = [r for r in reports if r.tool != "plain"]
    tools = list(dict.fromkeys(r.tool for r in cand))
    fig, ax = plt.subplots(figsize=(6, 3.2))
    width = 0.8 / max(1, len(tools))
    for k, t in enumerate(tools):
        counts = [sum(1 for r in cand if r.tool == t and r.status == s) for s in statuses]
        ax.bar([j + k * width for j in range(len(statuses))], counts, width, label=t)
    ax.set_xticks([j + width * (len(tools) - 1) / 2 for j in range(len(statuses))])
    ax.set_xticklabels(statuses)
    ax.set_ylabel("scenarios")
    if tools:
        ax.legend()
    fig.tight_layout()
    fig.savefig(out)
    plt.close(fig)
    return out


def render_figures(reports: Sequence[ScenarioReport], report_path) -> List[Path]:
    stem = _stem(report_path)
    return [plot_totals(reports, Path(f"{stem}_totals.png")),
            plot_status(reports, Path(f"{stem}_status.png"))]
