"""Survival-curve estimators: naive survivor, CGE and Kaplan-Meier."""

import numpy as np
import pytest

from cgesurv import CopulaSpec, censoring_cge, censoring_km, cge, km, naive_survivor
from conftest import km_oracle, random_survival_data

# dataset of the worked survival-curve example: ten subjects, mixed censoring
APPX_TIME = np.arange(1.0, 11.0)
APPX_EVENT = np.array([1, 0, 0, 1, 0, 1, 1, 0, 1, 1], dtype=bool)


def eq3_oracle(time, event, phi, phi_inv):
    """Direct evaluation of the copula-graphic sum with left-limit pi-hat.

    Independent of the library: processes records sorted by time with events
    first at ties, decrementing the naive survivor by 1/n per record.
    """
    time = np.asarray(time, dtype=float)
    event = np.asarray(event, dtype=bool)
    n = time.size
    order = np.lexsort((~event, time))
    acc = 0.0
    curve = {}
    for rank, i in enumerate(order):
        pi_left = (n - rank) / n
        if event[i]:
            lo = pi_left - 1.0 / n
            if lo <= 1e-12:
                acc = np.inf
            else:
                acc += phi(lo) - phi(pi_left)
        curve[time[i]] = phi_inv(acc)
    return curve


class TestNaiveSurvivor:
    def test_counting_definition(self):
        f = naive_survivor([1.0, 2.0, 3.0])
        assert abs(f(1.0) - 2.0 / 3.0) < 1e-15

    def test_all_exceed_t(self):
        f = naive_survivor([1.0, 2.0, 3.0])
        assert f(0.5) == 1.0

    def test_ties_all_at_t(self):
        f = naive_survivor([1.0, 1.0, 1.0])
        assert f(1.0) == 0.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            naive_survivor([])


class TestCgeIndependence:
    def test_appendix_dataset_values(self):
        s = cge(APPX_TIME, APPX_EVENT, CopulaSpec.independence())
        for t, expected in [(1, 0.9), (4, 0.7714), (6, 0.6171), (7, 0.4629), (9, 0.2314)]:
            assert abs(s(t) - expected) < 5e-5
        assert s(10.0) == 0.0

    def test_appendix_dataset_km_oracle(self):
        s = cge(APPX_TIME, APPX_EVENT, CopulaSpec.independence())
        ts, vals = km_oracle(APPX_TIME, APPX_EVENT)
        assert np.allclose(s(ts), vals, atol=1e-12)

    def test_matches_km_on_random_data(self):
        rng = np.random.default_rng(99)
        spec = CopulaSpec.independence()
        for _ in range(200):
            time, event = random_survival_data(rng)
            a = cge(time, event, spec)
            b = km(time, event)
            grid = np.concatenate(([0.0], np.unique(time)))
            assert np.allclose(a(grid), b(grid), atol=1e-10)


class TestCgeGeneral:
    def test_all_censored_is_constant_one(self, any_spec):
        s = cge([1.0, 2.0, 3.0], [False, False, False], any_spec)
        assert s(0.0) == 1.0 and s(100.0) == 1.0

    def test_clayton_lies_below_independence(self):
        indep = cge(APPX_TIME, APPX_EVENT, CopulaSpec.independence())
        grid = APPX_TIME
        prev_gap = np.zeros_like(grid)
        for theta in (2.0, 6.0):
            dep = cge(APPX_TIME, APPX_EVENT, CopulaSpec.from_theta("clayton", theta))
            gap = indep(grid) - dep(grid)
            assert np.all(gap >= -1e-12)
            # a larger theta pulls the curve down further wherever they differ
            assert np.all(gap >= prev_gap - 1e-12)
            assert gap.max() > prev_gap.max()
            prev_gap = gap

    @pytest.mark.parametrize("theta", [2.0, 6.0])
    def test_clayton_against_eq3_oracle(self, theta):
        phi = lambda u: (u ** (-theta) - 1.0) / theta
        phi_inv = lambda y: 0.0 if np.isinf(y) else (1.0 + theta * y) ** (-1.0 / theta)
        expected = eq3_oracle(APPX_TIME, APPX_EVENT, phi, phi_inv)
        s = cge(APPX_TIME, APPX_EVENT, CopulaSpec.from_theta("clayton", theta))
        for t, v in expected.items():
            assert abs(s(t) - v) < 1e-12

    def test_frank_against_eq3_oracle(self):
        theta = 2.3719
        phi = lambda u: -np.log(np.expm1(-theta * u) / np.expm1(-theta))
        phi_inv = lambda y: -np.log1p(np.exp(-y) * np.expm1(-theta)) / theta
        rng = np.random.default_rng(5)
        for _ in range(25):
            time, event = random_survival_data(rng, n=int(rng.integers(2, 30)))
            expected = eq3_oracle(time, event, phi, phi_inv)
            s = cge(time, event, CopulaSpec.from_theta("frank", theta))
            for t, v in expected.items():
                assert abs(s(t) - v) < 1e-10

    def test_monotone_and_bounded(self, any_spec):
        rng = np.random.default_rng(17)
        for _ in range(50):
            time, event = random_survival_data(rng)
            s = cge(time, event, any_spec)
            vals = np.concatenate(([s.initial_value], s.values))
            assert np.all(np.diff(vals) <= 1e-12)
            assert np.all((vals >= 0.0) & (vals <= 1.0 + 1e-12))

    def test_record_order_invariance(self, any_spec):
        rng = np.random.default_rng(23)
        time, event = random_survival_data(rng, n=25)
        perm = rng.permutation(25)
        a = cge(time, event, any_spec)
        b = cge(time[perm], event[perm], any_spec)
        assert np.array_equal(a.jump_times, b.jump_times)
        assert np.allclose(a.values, b.values, atol=1e-14)

    def test_constant_beyond_last_observation(self, any_spec):
        time = [1.0, 2.0, 3.0, 4.0]
        event = [True, True, False, False]
        s = cge(time, event, any_spec)
        assert s(4.0) == s(1e6)

    def test_event_at_last_record_drops_to_zero(self):
        # phi(0) is infinite for these families, so the curve hits exactly 0
        for spec in (CopulaSpec.independence(), CopulaSpec.from_theta("clayton", 2.0)):
            s = cge([1.0, 2.0], [True, True], spec)
            assert s(2.0) == 0.0

    def test_input_validation(self, any_spec):
        with pytest.raises(ValueError):
            cge([], [], any_spec)
        with pytest.raises(ValueError):
            cge([0.0, 1.0], [True, True], any_spec)
        with pytest.raises(ValueError):
            cge([1.0, 2.0], [True], any_spec)


class TestKm:
    def test_two_events(self):
        s = km([1.0, 2.0], [True, True])
        assert s(1.0) == 0.5 and s(2.0) == 0.0

    def test_no_events(self):
        s = km([1.0, 2.0], [False, False])
        assert s(5.0) == 1.0

    def test_matches_oracle(self):
        rng = np.random.default_rng(31)
        for _ in range(100):
            time, event = random_survival_data(rng)
            s = km(time, event)
            ts, vals = km_oracle(time, event)
            assert np.allclose(s(ts), vals, atol=1e-12)


class TestCensoringCurves:
    def test_km_status_flip(self):
        time = np.array([1.0, 2.0, 3.0, 4.0])
        event = np.array([True, False, True, False])
        a = censoring_km(time, event)
        b = km(time, ~event)
        grid = np.concatenate(([0.0], time))
        assert np.array_equal(a(grid), b(grid))

    def test_cge_status_flip(self, any_spec):
        time = np.array([1.0, 2.0, 3.0, 4.0])
        event = np.array([True, False, True, False])
        a = censoring_cge(time, event, any_spec)
        b = cge(time, ~event, any_spec)
        grid = np.concatenate(([0.0], time))
        assert np.allclose(a(grid), b(grid), atol=1e-14)
