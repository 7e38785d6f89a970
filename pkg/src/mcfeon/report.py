"""Benchmark reports: raw run CSV, per-load summaries with CIs, and figures.

Data files carry no timestamps so a rerun with the same configuration and
seeds reproduces them byte for byte.
"""

import csv
import json
import math
from pathlib import Path
from typing import Dict, List, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .engine import BlockingStats

RUN_COLUMNS = (
    "load_erlang",
    "policy",
    "seed",
    "offered",
    "established",
    "blocked_spectrum",
    "blocked_crosstalk",
    "blocked_reach",
    "blocked_no_route",
    "blocking_probability",
)

SUMMARY_COLUMNS = (
    "load_erlang",
    "policy",
    "seeds",
    "mean_blocking",
    "ci99_low",
    "ci99_high",
    "steady_blocking",
)

Z_99 = 2.5758293035489004  # two-sided 99% normal quantile


def run_row(load_erlang: float, policy: str, seed: int, stats: BlockingStats) -> Dict:
    return {
        "load_erlang": load_erlang,
        "policy": policy,
        "seed": seed,
        "offered": stats.offered,
        "established": stats.established,
        "blocked_spectrum": stats.blocked["spectrum"],
        "blocked_crosstalk": stats.blocked["crosstalk"],
        "blocked_reach": stats.blocked["reach"],
        "blocked_no_route": stats.blocked["no_route"],
        "blocking_probability": stats.blocking_probability,
    }


def write_runs_csv(rows: Sequence[Dict], path: Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=RUN_COLUMNS, extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow({col: row[col] for col in RUN_COLUMNS})


def write_window_series(rows: Sequence, path: Path) -> None:
    """One run's windowed blocking as `window_index, blocking`."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("window_index", "blocking"))
        writer.writerows(rows)


def mean_ci99(values: Sequence[float]) -> tuple:
    """Normal-approximation 99% interval over per-seed means."""
    n = len(values)
    mean = sum(values) / n
    if n < 2:
        return mean, mean, mean
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    half = Z_99 * math.sqrt(var / n)
    return mean, mean - half, mean + half


def summarize(rows: Sequence[Dict]) -> List[Dict]:
    """Per (policy, load) mean blocking with CI, recomputed from run rows."""
    groups: Dict[tuple, List[Dict]] = {}
    for row in rows:
        groups.setdefault((row["policy"], row["load_erlang"]), []).append(row)
    summary = []
    for (policy, load) in sorted(groups):
        members = groups[(policy, load)]
        mean, low, high = mean_ci99([r["blocking_probability"] for r in members])
        steady_vals = [r["steady_blocking"] for r in members if "steady_blocking" in r]
        steady = sum(steady_vals) / len(steady_vals) if steady_vals else mean
        summary.append(
            {
                "load_erlang": load,
                "policy": policy,
                "seeds": len(members),
                "mean_blocking": mean,
                "ci99_low": low,
                "ci99_high": high,
                "steady_blocking": steady,
            }
        )
    return summary


def write_summary_csv(summary: Sequence[Dict], path: Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=SUMMARY_COLUMNS)
        writer.writeheader()
        writer.writerows(summary)


def write_manifest(path: Path, payload: Dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def render_blocking_figure(summary: Sequence[Dict], path: Path) -> None:
    """Mean blocking vs offered load, one curve per policy, 99% CI bars."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    policies = sorted({row["policy"] for row in summary})
    for policy in policies:
        rows = sorted(
            (r for r in summary if r["policy"] == policy),
            key=lambda r: r["load_erlang"],
        )
        loads = [r["load_erlang"] for r in rows]
        means = [r["mean_blocking"] for r in rows]
        err_low = [max(r["mean_blocking"] - r["ci99_low"], 0.0) for r in rows]
        err_high = [max(r["ci99_high"] - r["mean_blocking"], 0.0) for r in rows]
        ax.errorbar(
            loads, means, yerr=[err_low, err_high], marker="o", capsize=3, label=policy
        )
    if all(r["mean_blocking"] > 0 for r in summary):
        ax.set_yscale("log")
    ax.set_xlabel("Offered load (Erlang)")
    ax.set_ylabel("Blocking probability")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_window_figure(
    window_data: Dict[tuple, Sequence[tuple]], path: Path
) -> None:
    """Windowed blocking over a run, one curve per (load, seed)."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for (load, seed), rows in sorted(window_data.items()):
        xs = [idx for idx, _ in rows]
        ys = [blocking for _, blocking in rows]
        ax.plot(xs, ys, label=f"{load:g} Erlang, seed {seed}", alpha=0.8)
    ax.set_xlabel("Window index")
    ax.set_ylabel("Blocking probability")
    ax.grid(True, alpha=0.3)
    if window_data:
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
