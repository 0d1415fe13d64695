"""Tree evaluation metrics: split precision, Harrell's C and the Integrated Brier Score."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .stepfun import StepFunction


@dataclass(frozen=True)
class MetricReport:
    n_terminal: int
    precision: float  # nan when the tree has no internal node
    harrell_c: float
    ibs_km: float
    ibs_cge: float | None = None


def precision(tree, informative_indices) -> float:
    """Share of internal nodes splitting on an informative covariate; nan if none."""
    informative = set(int(i) for i in informative_indices)
    internal = [node for node in tree.nodes.values() if node.split is not None]
    if not internal:
        return float("nan")
    hits = sum(node.split.covariate_index in informative for node in internal)
    return hits / len(internal)


def harrell_c(terminal_numbers, time, event) -> float:
    """Concordance of terminal-node prognosis ranks with observed survival.

    A pair (i, j) is comparable iff x_i > x_j and subject j had an event; low
    terminal numbers indicate long survival. Returns nan when no pair is
    comparable.
    """
    tn = np.asarray(terminal_numbers)
    x = np.asarray(time, dtype=float)
    d = np.asarray(event, dtype=bool)
    if not tn.shape == x.shape == d.shape or x.size < 2:
        raise ValueError("inputs must be equal-length with at least 2 entries")
    comparable = (x[:, None] > x[None, :]) & d[None, :]
    cc = int((comparable & (tn[:, None] < tn[None, :])).sum())
    dc = int((comparable & (tn[:, None] > tn[None, :])).sum())
    tr = int((comparable & (tn[:, None] == tn[None, :])).sum())
    total = cc + dc + tr
    if total == 0:
        return float("nan")
    return (cc + 0.5 * tr) / total


def _floored_eval(curve: StepFunction, t: np.ndarray) -> np.ndarray:
    vals = np.atleast_1d(np.asarray(curve(t), dtype=float))
    positive = np.concatenate(([curve.initial_value], curve.values))
    positive = positive[positive > 0.0]
    floor = positive.min() if positive.size else 1.0
    return np.maximum(vals, floor)


def integrated_brier(time, event, surv_curves, censor_curve: StepFunction, grid_times) -> float:
    """Grid estimator of the Integrated Brier Score.

    ``surv_curves`` is one predicted survival StepFunction per test subject (a
    single curve is broadcast to all). ``censor_curve`` is the censoring
    survivor estimated on training data; its evaluations are floored at the
    smallest positive value it attains so inverse weights stay finite.
    ``grid_times`` should be the observed test/training times; the step
    estimators are constant in between.
    """
    x = np.asarray(time, dtype=float)
    d = np.asarray(event, dtype=bool)
    n = x.size
    if isinstance(surv_curves, StepFunction):
        surv_curves = [surv_curves] * n
    if len(surv_curves) != n:
        raise ValueError("need one survival curve per subject")
    grid = np.unique(np.asarray(grid_times, dtype=float))
    if grid.size < 2:
        raise ValueError("grid must contain at least two timepoints")
    left = grid[:-1]
    widths = np.diff(grid)
    s = np.stack([np.atleast_1d(np.asarray(c(left), dtype=float)) for c in surv_curves])  # (n, m-1)
    c_grid = _floored_eval(censor_curve, left)  # (m-1,)
    c_at_x = _floored_eval(censor_curve, x)  # (n,)
    before = x[:, None] >= left[None, :]
    term = np.where(
        before,
        (1.0 - s) ** 2 / c_grid[None, :],
        s**2 / c_at_x[:, None],
    )
    per_cell = term.mean(axis=0)
    return float((per_cell @ widths) / x.max())
