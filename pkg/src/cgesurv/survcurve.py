"""Survival-curve estimators: naive survivor, copula-graphic and Kaplan-Meier."""

from __future__ import annotations

import numpy as np

from .copulas import CopulaSpec, generator, generator_inverse
from .stepfun import StepFunction


def _check_times(time: np.ndarray) -> np.ndarray:
    time = np.asarray(time, dtype=float)
    if time.size == 0:
        raise ValueError("empty sample")
    if not np.all(np.isfinite(time)) or np.any(time <= 0):
        raise ValueError("observation times must be finite and > 0")
    return time


def naive_survivor(time) -> StepFunction:
    """Empirical survivor of the observed times: (#{x_i > t}) / n."""
    time = _check_times(time)
    n = time.size
    uniq, counts = np.unique(time, return_counts=True)
    values = 1.0 - np.cumsum(counts) / n
    return StepFunction(uniq, values)


def phi_grid(spec: CopulaSpec, n: int) -> np.ndarray:
    """Generator evaluated on the survivor grid j/n, j = 0..n, with phi(0) = +inf."""
    g = np.empty(n + 1)
    g[0] = np.inf
    g[1:] = generator(spec, np.arange(1, n + 1) / n)
    return g


def cge(time, event, spec: CopulaSpec) -> StepFunction:
    """Copula-graphic estimator of the survival function.

    The naive survivor is evaluated at the left limit of each event time; tied
    records are processed as successive 1/n decrements with events before
    censorings, which makes the independence case agree with Kaplan-Meier
    exactly. All-censored data yields the constant-1 curve.
    """
    time = _check_times(time)
    event = np.asarray(event, dtype=bool)
    if event.shape != time.shape:
        raise ValueError("time and event must have equal length")
    n = time.size
    order = np.lexsort((~event, time))
    t_s, e_s = time[order], event[order]
    grid = phi_grid(spec, n)
    remaining = n - np.arange(n)  # n*pi-hat left limit under successive decrements
    jumps = np.where(e_s, grid[remaining - 1] - grid[remaining], 0.0)
    surv = generator_inverse(spec, np.cumsum(jumps))
    # one step per unique time carrying at least one event; value after the full tie block
    uniq, last = np.unique(t_s[::-1], return_index=True)
    last = n - 1 - last
    has_event = np.logical_or.reduceat(e_s, np.searchsorted(t_s, uniq))
    return StepFunction(uniq[has_event], surv[last][has_event])


def km(time, event) -> StepFunction:
    """Kaplan-Meier product-limit estimator."""
    time = _check_times(time)
    event = np.asarray(event, dtype=bool)
    if event.shape != time.shape:
        raise ValueError("time and event must have equal length")
    uniq = np.unique(time[event])
    at_risk = np.array([(time >= t).sum() for t in uniq], dtype=float)
    deaths = np.array([(event & (time == t)).sum() for t in uniq], dtype=float)
    values = np.cumprod(1.0 - deaths / at_risk)
    return StepFunction(uniq, values)


def censoring_km(time, event) -> StepFunction:
    """Kaplan-Meier estimate of the censoring survivor (status flipped)."""
    return km(time, ~np.asarray(event, dtype=bool))


def censoring_cge(time, event, spec: CopulaSpec) -> StepFunction:
    """Copula-graphic estimate of the censoring survivor (status flipped)."""
    return cge(time, ~np.asarray(event, dtype=bool), spec)
