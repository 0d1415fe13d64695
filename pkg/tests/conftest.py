"""Shared helpers for the test suite."""

import numpy as np
import pytest

from cgesurv import CopulaSpec


def random_survival_data(rng, n=None, with_ties=True):
    """A random right-censored sample (time, event) with optional ties."""
    if n is None:
        n = int(rng.integers(1, 61))
    if with_ties and rng.random() < 0.5:
        time = rng.integers(1, max(2, n // 2 + 2), size=n).astype(float)
    else:
        time = rng.exponential(1.0, size=n) + 1e-3
    event = rng.random(n) < rng.uniform(0.2, 1.0)
    return time, event


@pytest.fixture
def rng():
    return np.random.default_rng(20260824)


@pytest.fixture(params=["independence", "clayton-2", "frank-3"])
def any_spec(request):
    name = request.param
    if name == "independence":
        return CopulaSpec.independence()
    family, theta = name.split("-")
    return CopulaSpec.from_theta(family, float(theta))


def km_oracle(time, event):
    """Independent product-limit oracle: returns (event_times, survival_values)."""
    time = np.asarray(time, dtype=float)
    event = np.asarray(event, dtype=bool)
    ts = np.unique(time[event])
    s = 1.0
    vals = []
    for t in ts:
        n_at_risk = np.sum(time >= t)
        d = np.sum(event & (time == t))
        s *= 1.0 - d / n_at_risk
        vals.append(s)
    return ts, np.array(vals)
