"""Scenario generation and Monte Carlo study runners.

Survival times follow a Cox-exponential model, T = -log(U) * exp(-lp) for a
linear predictor lp; censoring times are C = -log(V) / (r / (1 - r)), which for
lp = 0 and independent (U, V) yields a censoring fraction of exactly r.
Dependence between T and C comes from drawing (U, V) under a copula.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
from joblib import Parallel, delayed

from .copulas import CopulaSpec, Family
from .data import Dataset
from .metrics import MetricReport, harrell_c, integrated_brier, precision
from .survcurve import censoring_cge, censoring_km
from .tree import TreeConfig, fit_tree
from .twosample import logrank_test, permutation_test

COVARIATE_KINDS = (
    "binary_groups",
    "normal_mean_shift",
    "normal_var_shift",
    "poisson_shift",
    "pathway_block",
)


def worker_count() -> int:
    """Worker cap from CGESURV_THREADS; results do not depend on it."""
    try:
        return max(1, int(os.environ.get("CGESURV_THREADS", "1")))
    except ValueError:
        return 1


def censoring_rate(r: float) -> float:
    """Exponential censoring rate calibrated so lp = 0 data is censored with prob r."""
    if not 0.0 < r < 1.0:
        raise ValueError(f"censoring fraction must lie in (0, 1), got {r}")
    return r / (1.0 - r)


@dataclass(frozen=True)
class Scenario:
    covariate_kind: str
    censoring_r: float
    dependence: CopulaSpec
    effect: float = 0.0  # beta for binary/pathway kinds, gamma otherwise
    n1: int = 0
    n2: int = 0
    n: int = 0  # pathway kind: subjects per dataset
    p: int = 50
    q: int = 10
    rho: float = 0.5

    def __post_init__(self):
        if self.covariate_kind not in COVARIATE_KINDS:
            raise ValueError(f"unknown covariate_kind {self.covariate_kind!r}")
        censoring_rate(self.censoring_r)
        if self.covariate_kind == "pathway_block":
            if self.n < 1:
                raise ValueError("pathway_block requires n >= 1")
            if self.p <= 2 * self.q:
                raise ValueError("pathway_block requires p > 2q")
        elif self.n1 < 1 or self.n2 < 1:
            raise ValueError("two-group scenarios require n1, n2 >= 1")


@dataclass(frozen=True)
class SimulatedData:
    dataset: Dataset
    group: np.ndarray | None  # 1/2 labels for two-group kinds, None for pathway
    latent_t: np.ndarray
    latent_c: np.ndarray

    def group_arrays(self):
        g1 = self.group == 1
        d = self.dataset
        return d.time[g1], d.event[g1], d.time[~g1], d.event[~g1]


def _survival_and_censoring(lp, scenario: Scenario, rng) -> tuple[np.ndarray, np.ndarray]:
    uv = _sample_uv(scenario.dependence, lp.size, rng)
    t = -np.log(uv[:, 0]) * np.exp(-lp)
    c = -np.log(uv[:, 1]) / censoring_rate(scenario.censoring_r)
    return t, c


def _sample_uv(spec: CopulaSpec, n: int, rng) -> np.ndarray:
    from .copulas import sample_pairs

    return sample_pairs(spec, n, rng)


def _pathway_covariates(scenario: Scenario, rng) -> np.ndarray:
    n, p, q, rho = scenario.n, scenario.p, scenario.q, scenario.rho
    z = rng.standard_normal((n, p))
    for start in (0, q):  # the two informative blocks share a common factor
        common = rng.standard_normal((n, 1))
        z[:, start : start + q] = np.sqrt(rho) * common + np.sqrt(1.0 - rho) * z[
            :, start : start + q
        ]
    from scipy.stats import norm

    u = norm.cdf(z)
    cov = (u - 0.5) * (2.0 * np.sqrt(3.0))  # Uniform(-sqrt(3), sqrt(3)): mean 0, sd 1
    # first half of each block becomes binary via the per-covariate sample median
    for start, size in ((0, q), (q, q), (2 * q, p - 2 * q)):
        for j in range(start, start + size // 2):
            cov[:, j] = (cov[:, j] >= np.median(cov[:, j])).astype(float)
    return np.round(cov, 1)


def generate_dataset(scenario: Scenario, rng) -> SimulatedData:
    """One simulated dataset plus the latent (T, C) pair for oracle checks."""
    kind = scenario.covariate_kind
    if kind == "pathway_block":
        cov = _pathway_covariates(scenario, rng)
        beta = np.concatenate(
            [
                np.full(scenario.q, scenario.effect),
                np.full(scenario.q, -scenario.effect),
                np.zeros(scenario.p - 2 * scenario.q),
            ]
        )
        lp = cov @ beta
        group = None
    else:
        n1, n2 = scenario.n1, scenario.n2
        group = np.concatenate([np.ones(n1, dtype=int), np.full(n2, 2, dtype=int)])
        g2 = group == 2
        if kind == "binary_groups":
            z = g2.astype(float)
            lp = scenario.effect * z
        elif kind == "normal_mean_shift":
            z = rng.standard_normal(n1 + n2)
            z[g2] += scenario.effect
            lp = z
        elif kind == "normal_var_shift":
            z = rng.standard_normal(n1 + n2)
            z[g2] *= scenario.effect
            lp = z
        else:  # poisson_shift
            z = np.empty(n1 + n2)
            z[~g2] = rng.poisson(1.0, n1)
            z[g2] = rng.poisson(1.0 + scenario.effect, n2)
            lp = z
        cov = z.reshape(-1, 1)
    t, c = _survival_and_censoring(np.asarray(lp, dtype=float), scenario, rng)
    x = np.minimum(t, c)
    delta = t <= c
    return SimulatedData(
        dataset=Dataset(x, delta, cov),
        group=group,
        latent_t=t,
        latent_c=c,
    )


@dataclass(frozen=True)
class StudyConfig:
    scenario: Scenario
    n_sim: int
    n_perm: int
    methods: list[tuple[str, float | None]]  # ("cge", tau_assum) or ("logrank", None)
    master_seed: int
    alpha: float = 0.05

    def __post_init__(self):
        if self.n_sim < 1:
            raise ValueError("n_sim must be >= 1")


def method_label(method: tuple[str, float | None]) -> str:
    kind, tau = method
    return kind if kind == "logrank" else f"cge_tau{tau:g}"


def _spec_for_tau(tau: float | None) -> CopulaSpec:
    if tau is None or tau == 0.0:
        return CopulaSpec.independence()
    return CopulaSpec.from_tau(Family.CLAYTON, tau)


@dataclass(frozen=True)
class StudySummary:
    config: StudyConfig
    power: dict[str, float]
    se: dict[str, float]
    mean_censoring_group1: float
    mean_censoring_group2: float
    p_values: np.ndarray  # (n_sim, n_methods)


def _study_replicate(config: StudyConfig, i: int):
    ss = np.random.SeedSequence(config.master_seed, spawn_key=(i,))
    gen_ss, *test_ss = ss.spawn(1 + len(config.methods))
    sim = generate_dataset(config.scenario, np.random.default_rng(gen_ss))
    t1, e1, t2, e2 = sim.group_arrays()
    pvals = np.empty(len(config.methods))
    for m, (kind, tau) in enumerate(config.methods):
        if kind == "logrank":
            pvals[m] = logrank_test(t1, e1, t2, e2).p_value
        else:
            res = permutation_test(
                t1, e1, t2, e2, _spec_for_tau(tau), config.n_perm, test_ss[m]
            )
            pvals[m] = res.p_value
    return pvals, 1.0 - e1.mean(), 1.0 - e2.mean()


def run_study(config: StudyConfig) -> StudySummary:
    """Rejection-rate study over two-sample scenarios; deterministic by master seed."""
    results = Parallel(n_jobs=worker_count())(
        delayed(_study_replicate)(config, i) for i in range(config.n_sim)
    )
    pvals = np.stack([r[0] for r in results])
    cens1 = np.array([r[1] for r in results])
    cens2 = np.array([r[2] for r in results])
    power, se = {}, {}
    for m, method in enumerate(config.methods):
        label = method_label(method)
        phat = float((pvals[:, m] <= config.alpha).mean())
        power[label] = phat
        se[label] = float(np.sqrt(phat * (1.0 - phat) / config.n_sim))
    return StudySummary(
        config=config,
        power=power,
        se=se,
        mean_censoring_group1=float(cens1.mean()),
        mean_censoring_group2=float(cens2.mean()),
        p_values=pvals,
    )


@dataclass(frozen=True)
class TreeStudySummary:
    config: StudyConfig
    p_threshold: float
    mean_terminal_nodes: dict[str, float]
    mean_precision: dict[str, float]
    mean_harrell_c: dict[str, float]
    mean_ibs_km: dict[str, float]
    mean_ibs_cge: dict[str, float]
    reports: dict[str, list[MetricReport]]


def evaluate_tree(tree, train: Dataset, test: Dataset, informative, tau_theor: float):
    """MetricReport of a fitted tree on a held-out dataset."""
    terminal_by_number = {n.terminal_number: n for n in tree.terminal_nodes()}
    tn = tree.predict_nodes(test.covariates)
    curves = [terminal_by_number[k].curve for k in tn]
    grid = np.union1d(train.time, test.time)
    ibs_km = integrated_brier(
        test.time, test.event, curves, censoring_km(train.time, train.event), grid
    )
    cge_spec = _spec_for_tau(tau_theor)
    ibs_cge = integrated_brier(
        test.time, test.event, curves, censoring_cge(train.time, train.event, cge_spec), grid
    )
    return MetricReport(
        n_terminal=tree.n_terminal,
        precision=precision(tree, informative),
        harrell_c=harrell_c(tn, test.time, test.event),
        ibs_km=ibs_km,
        ibs_cge=ibs_cge,
    )


def _tree_replicate(config: StudyConfig, p_threshold: float, min_node_size: int, i: int):
    ss = np.random.SeedSequence(config.master_seed, spawn_key=(i,))
    train_ss, test_ss, tree_ss = ss.spawn(3)
    train = generate_dataset(config.scenario, np.random.default_rng(train_ss)).dataset
    test = generate_dataset(config.scenario, np.random.default_rng(test_ss)).dataset
    informative = range(2 * config.scenario.q)
    tree_seed = int(tree_ss.generate_state(1)[0])
    out = []
    for kind, tau in config.methods:
        cfg = TreeConfig(
            copula=_spec_for_tau(tau),
            p_threshold=p_threshold,
            n_perm=config.n_perm,
            seed=tree_seed,
            min_node_size=min_node_size,
            method="cge" if kind == "cge" else "logrank",
        )
        tree = fit_tree(train, cfg)
        out.append(evaluate_tree(tree, train, test, informative, config.scenario.dependence.tau))
    return out


def run_tree_study(
    config: StudyConfig, p_threshold: float = 0.01, min_node_size: int = 3
) -> TreeStudySummary:
    """Fit-and-evaluate study for pathway scenarios: one train/test pair per round."""
    if config.scenario.covariate_kind != "pathway_block":
        raise ValueError("run_tree_study requires a pathway_block scenario")
    rows = Parallel(n_jobs=worker_count())(
        delayed(_tree_replicate)(config, p_threshold, min_node_size, i)
        for i in range(config.n_sim)
    )
    labels = [method_label(m) for m in config.methods]
    reports = {lab: [row[m] for row in rows] for m, lab in enumerate(labels)}

    def mean_of(attr):
        out = {}
        for lab in labels:
            vals = np.array([getattr(r, attr) for r in reports[lab]], dtype=float)
            vals = vals[~np.isnan(vals)]
            out[lab] = float(vals.mean()) if vals.size else float("nan")
        return out

    return TreeStudySummary(
        config=config,
        p_threshold=p_threshold,
        mean_terminal_nodes=mean_of("n_terminal"),
        mean_precision=mean_of("precision"),
        mean_harrell_c=mean_of("harrell_c"),
        mean_ibs_km=mean_of("ibs_km"),
        mean_ibs_cge=mean_of("ibs_cge"),
        reports=reports,
    )
