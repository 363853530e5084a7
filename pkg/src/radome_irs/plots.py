"""Figure rendering for experiment result rows.

Each report command writes a PNG next to its CSV.  Rendering is best-effort
presentation only; the CSV remains the canonical output.
"""

from __future__ import annotations

from collections import defaultdict

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _series(rows):
    """Group rows into {(algorithm, param_name): {param_value: [rates]}}."""
    grouped: dict[tuple[str, str], dict] = defaultdict(lambda: defaultdict(list))
    for row in rows:
        grouped[(row.algorithm, row.param_name)][row.param_value].append(
            row.sum_rate_bps_hz
        )
    return grouped

def render_results_figure(rows, path) -> None:
    """Mean sum-rate per algorithm, against the swept parameter if numeric."""
    grouped = _series(rows)
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    numeric = all(
        isinstance(v, (int, float)) and not isinstance(v, bool)
        for per_value in grouped.values()
        for v in per_value
    )
    if numeric:
        for (algorithm, param_name), per_value in sorted(grouped.items()):
            values = sorted(per_value)
            means = [float(np.mean(per_value[v])) for v in values]
            if len(values) == 1:
                ax.axhline(means[0], linestyle="--", label=algorithm)
            else:
                ax.plot(values, means, marker="o", label=algorithm)
                ax.set_xlabel(param_name)
    else:
        labels, means = [], []
        for (algorithm, _), per_value in sorted(grouped.items()):
            for value in sorted(per_value, key=str):
                labels.append(f"{algorithm}:{value}")
                means.append(float(np.mean(per_value[value])))
        ax.bar(range(len(labels)), means)
        ax.set_xticks(range(len(labels)))
        ax.set_xticklabels(labels, rotation=30, ha="right")
    ax.set_ylabel("sum rate (bps/Hz)")
    ax.grid(True, alpha=0.3)
    if ax.get_legend_handles_labels()[0]:
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_trace_figure(trace, path) -> None:
    """Accepted sum-rate after each optimizer step."""
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    ax.plot(range(1, len(trace.rates) + 1), trace.rates, marker="o")
    ax.set_xlabel("iteration")
    ax.set_ylabel("sum rate (bps/Hz)")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
