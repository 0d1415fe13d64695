"""Right-continuous piecewise-constant curves with exact jump arithmetic."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class StepFunction:
    """A right-continuous step function on [0, inf).

    The value is ``initial_value`` on [0, jump_times[0]) and ``values[j]`` on
    [jump_times[j], jump_times[j+1]); evaluation beyond the last jump returns
    the last value. Survival curves use initial_value = 1 and non-increasing
    values in [0, 1].
    """

    jump_times: np.ndarray
    values: np.ndarray
    initial_value: float = 1.0

    def __post_init__(self):
        jt = np.asarray(self.jump_times, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if jt.shape != vals.shape or jt.ndim != 1:
            raise ValueError("jump_times and values must be 1-d arrays of equal length")
        if jt.size and np.any(np.diff(jt) <= 0):
            raise ValueError("jump_times must be strictly increasing")
        object.__setattr__(self, "jump_times", jt)
        object.__setattr__(self, "values", vals)

    def __call__(self, t) -> np.ndarray | float:
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.jump_times, t, side="right")
        padded = np.concatenate(([self.initial_value], self.values))
        out = padded[idx]
        return out if out.ndim else float(out)

    def to_csv(self, path) -> None:
        """Write jump points as two-column CSV, prefixed with the point (0, initial)."""
        pts = np.column_stack(
            [
                np.concatenate(([0.0], self.jump_times)),
                np.concatenate(([self.initial_value], self.values)),
            ]
        )
        np.savetxt(path, pts, delimiter=",", header="time,value", comments="", fmt="%.17g")


def _partition_eval(a: StepFunction, b: StepFunction, lo: float, hi: float):
    """Breakpoints of |[lo, hi)| refined at the union of jump times, plus curve values."""
    cuts = np.concatenate(([lo], a.jump_times, b.jump_times, [hi]))
    cuts = np.unique(cuts[(cuts >= lo) & (cuts <= hi)])
    left = cuts[:-1]
    widths = np.diff(cuts)
    return a(left) - b(left), widths


def integrate_abs_diff(a: StepFunction, b: StepFunction, lo: float, hi: float) -> float:
    """Exact integral of |a(t) - b(t)| over [lo, hi)."""
    if lo > hi:
        raise ValueError(f"integration bounds out of order: [{lo}, {hi}]")
    if lo == hi:
        return 0.0
    diff, widths = _partition_eval(a, b, lo, hi)
    return float(np.abs(diff) @ widths)


def integrate_signed_diff(a: StepFunction, b: StepFunction, lo: float, hi: float) -> float:
    """Exact integral of (a(t) - b(t)) over [lo, hi)."""
    if lo > hi:
        raise ValueError(f"integration bounds out of order: [{lo}, {hi}]")
    if lo == hi:
        return 0.0
    diff, widths = _partition_eval(a, b, lo, hi)
    return float(diff @ widths)
