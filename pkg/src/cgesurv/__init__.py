"""Survival analysis under dependent censoring via copula-graphic estimators.

Provides Archimedean copula utilities, the copula-graphic survival estimator,
a permutation test for equal survival between two groups, survival trees that
use the test as splitting criterion, evaluation metrics, and simulation-study
runners.
"""

from .copulas import (
    CopulaSpec,
    CopulaSpecError,
    Family,
    generator,
    generator_inverse,
    sample_pairs,
    tau_to_theta,
    theta_to_tau,
)
from .data import Dataset, kfold_assignment, load_csv
from .metrics import MetricReport, harrell_c, integrated_brier, precision
from .simgen import (
    Scenario,
    SimulatedData,
    StudyConfig,
    StudySummary,
    TreeStudySummary,
    censoring_rate,
    generate_dataset,
    run_study,
    run_tree_study,
)
from .stepfun import StepFunction, integrate_abs_diff, integrate_signed_diff
from .survcurve import censoring_cge, censoring_km, cge, km, naive_survivor
from .tree import (
    SplitCandidate,
    SurvivalTree,
    TreeConfig,
    TreeConfigError,
    TreeNode,
    enumerate_splits,
    fit_tree,
)
from .twosample import (
    CapacityError,
    LogrankResult,
    PermutationResult,
    enumerate_exact,
    l1_statistic,
    logrank_test,
    permutation_test,
)

__version__ = "0.1.0"
