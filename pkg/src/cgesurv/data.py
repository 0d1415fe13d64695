"""Right-censored dataset container, CSV ingestion and fold assignment.

The on-disk format is a headered CSV with required columns ``time`` (positive
real) and ``status`` (1 = event, 0 = censored); every remaining column is a
numeric covariate. Missing cells are not supported.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np


@dataclass
class Dataset:
    time: np.ndarray
    event: np.ndarray
    covariates: np.ndarray
    names: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.time = np.asarray(self.time, dtype=float)
        self.event = np.asarray(self.event, dtype=bool)
        cov = np.asarray(self.covariates, dtype=float)
        if cov.ndim == 1:
            cov = cov.reshape(-1, 1)
        self.covariates = cov
        if self.time.ndim != 1 or self.time.size == 0:
            raise ValueError("time must be a nonempty 1-d array")
        if self.event.shape != self.time.shape or cov.shape[0] != self.time.size:
            raise ValueError("time, event and covariates must have matching lengths")
        if np.any(self.time <= 0) or not np.all(np.isfinite(self.time)):
            raise ValueError("times must be finite and > 0")
        if not self.names:
            self.names = [f"z{j}" for j in range(cov.shape[1])]
        if len(self.names) != cov.shape[1]:
            raise ValueError("covariate name count does not match columns")

    def __len__(self) -> int:
        return self.time.size

    @property
    def n_covariates(self) -> int:
        return self.covariates.shape[1]

    def subset(self, idx) -> "Dataset":
        return Dataset(self.time[idx], self.event[idx], self.covariates[idx], self.names)

    def round_covariates(self, decimals: int) -> "Dataset":
        return Dataset(self.time, self.event, np.round(self.covariates, decimals), self.names)

    def censoring_fraction(self) -> float:
        return float(1.0 - self.event.mean())

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["time", "status", *self.names])
            for i in range(len(self)):
                writer.writerow(
                    [
                        np.format_float_positional(self.time[i], trim="-"),
                        int(self.event[i]),
                        *(np.format_float_positional(v, trim="-") for v in self.covariates[i]),
                    ]
                )


def load_csv(path, drop_missing: bool = False) -> Dataset:
    """Read a dataset CSV; raises on missing cells unless ``drop_missing``."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"{path}: empty file")
        header = [h.strip() for h in header]
        rows = [row for row in reader if row]
    for col in ("time", "status"):
        if col not in header:
            raise ValueError(f"{path}: required column '{col}' missing")
    missing = [i for i, row in enumerate(rows) if any(cell.strip() == "" for cell in row)]
    if missing:
        if not drop_missing:
            raise ValueError(
                f"{path}: {len(missing)} row(s) contain missing cells; "
                "remove them or pass drop_missing"
            )
        rows = [row for i, row in enumerate(rows) if i not in set(missing)]
    if not rows:
        raise ValueError(f"{path}: no complete rows")
    arr = np.array(rows, dtype=float)
    ti, si = header.index("time"), header.index("status")
    cov_idx = [j for j in range(len(header)) if j not in (ti, si)]
    status = arr[:, si]
    if not np.all(np.isin(status, (0.0, 1.0))):
        raise ValueError(f"{path}: status must be 0/1")
    return Dataset(
        arr[:, ti], status.astype(bool), arr[:, cov_idx], [header[j] for j in cov_idx]
    )


def bundled_dataset_path():
    """Path of the packaged PBC-style liver-disease example dataset."""
    from importlib.resources import files

    return files("cgesurv") / "data" / "pbc_style.csv"


def kfold_assignment(n: int, k: int, seed) -> np.ndarray:
    """Seeded fold ids in {0..k-1}; fold sizes differ by at most one."""
    if k < 2 or k > n:
        raise ValueError(f"need 2 <= k <= n, got k={k}, n={n}")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    folds = np.arange(n) % k
    rng.shuffle(folds)
    return folds
