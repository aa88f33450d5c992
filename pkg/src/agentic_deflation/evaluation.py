"""Result-table metrics: RMSE gap between agent and numerical-baseline
residuals, and mean step counts per (dataset, strategy, ICL count)."""
import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .matrix import rmse_between, rmse_to_zero
from .rank1 import baseline_deflate, baseline_deflate_k

__all__ = [
    "GAP_MODES",
    "CSV_COLUMNS",
    "RunRecord",
    "SummaryRow",
    "rmse_gap",
    "baseline_for",
    "summarize",
    "summary_csv",
    "summary_table",
]

GAP_MODES = ("abs", "between")

CSV_COLUMNS = (
    "dataset", "strategy", "icl_count", "n_samples", "gap_abs_mean",
    "gap_between_mean", "agent_steps_mean", "baseline_steps_mean", "aborted_count",
)


def rmse_gap(agent_trace, baseline_trace, mode="abs"):
    """``abs``: difference of residual RMSEs; ``between``: RMSE of the
    difference of the residuals."""
    if not np.array_equal(agent_trace.original, baseline_trace.original):
        raise ValueError("traces were not computed from the same original matrix")
    if mode == "abs":
        return abs(rmse_to_zero(agent_trace.residual) - rmse_to_zero(baseline_trace.residual))
    if mode == "between":
        return rmse_between(agent_trace.residual, baseline_trace.residual)
    raise ValueError(f"mode must be one of {GAP_MODES}, got {mode!r}")


def baseline_for(matrix, dataset, k=None, stop_fraction=0.1, max_steps=32):
    """The numerical target: ``k`` fixed steps for synthetic data with known
    construction rank, otherwise deflation to ``stop_fraction`` of the norm."""
    if dataset == "synthetic":
        if k is None:
            raise ValueError("synthetic baselines need the construction rank k")
        return baseline_deflate_k(matrix, k)
    return baseline_deflate(matrix, stop_fraction, max_steps)


@dataclass(frozen=True)
class RunRecord:
    dataset: str
    strategy: str
    icl_count: int
    agent: object      # DeflationTrace
    baseline: object   # DeflationTrace


@dataclass(frozen=True)
class SummaryRow:
    dataset: str
    strategy: str
    icl_count: int
    n_samples: int
    gap_abs_mean: float
    gap_between_mean: float
    agent_steps_mean: float
    baseline_steps_mean: float
    aborted_count: int

    def as_tuple(self):
        return tuple(getattr(self, c) for c in CSV_COLUMNS)


def summarize(runs):
    """One row per (dataset, strategy, icl_count), sorted by that key."""
    runs = list(runs)
    if not runs:
        raise ValueError("summarize needs at least one run")
    groups = {}
    for r in runs:
        groups.setdefault((r.dataset, r.strategy, r.icl_count), []).append(r)
    rows = []
    for key in sorted(groups):
        rs = groups[key]
        # fsum keeps the means independent of run order
        n = len(rs)
        rows.append(SummaryRow(
            *key,
            n_samples=n,
            gap_abs_mean=(math.fsum([rmse_gap(r.agent, r.baseline, "abs") for r in rs]) / n),
            gap_between_mean=(
                math.fsum([rmse_gap(r.agent, r.baseline, "between") for r in rs]) / n),
            agent_steps_mean=sum(r.agent.n_steps for r in rs) / n,
            baseline_steps_mean=sum(r.baseline.n_steps for r in rs) / n,
            aborted_count=sum(r.agent.aborted for r in rs),
        ))
    return rows


def _cell(x):
    return f"{x:.6f}" if isinstance(x, float) else str(x)


def summary_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in rows:
        w.writerow([_cell(x) for x in row.as_tuple()])
    return buf.getvalue()


def summary_table(rows):
    """Aligned plain-text rendering of the summary rows."""
    cells = [list(CSV_COLUMNS)] + [[_cell(x) for x in r.as_tuple()] for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(CSV_COLUMNS))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"
