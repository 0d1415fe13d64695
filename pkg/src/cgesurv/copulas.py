"""Archimedean copula generators, Kendall tau conversions and dependent sampling.

Supported families are the independence copula (phi(u) = -log u), the Clayton
copula (phi(u) = (u^-theta - 1)/theta, theta > 0) and the Frank copula
(phi(u) = -log((exp(-theta*u)-1)/(exp(-theta)-1)), theta != 0).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize


class Family(str, enum.Enum):
    INDEPENDENCE = "independence"
    CLAYTON = "clayton"
    FRANK = "frank"


class CopulaSpecError(ValueError):
    """Invalid copula family/parameter combination."""


_TAU_THETA_ATOL = {Family.CLAYTON: 1e-12, Family.FRANK: 1e-8}


@dataclass(frozen=True)
class CopulaSpec:
    """An Archimedean copula family plus its dependence parameter.

    ``theta`` and ``tau`` are redundant; both are stored so reports can show
    either. Consistency is validated on construction.
    """

    family: Family
    theta: float = 0.0
    tau: float = 0.0

    def __post_init__(self):
        fam = Family(self.family)
        object.__setattr__(self, "family", fam)
        if fam is Family.INDEPENDENCE:
            if self.theta != 0.0 or self.tau != 0.0:
                raise CopulaSpecError("independence copula requires theta = tau = 0")
            return
        if fam is Family.CLAYTON and self.theta <= 0.0:
            raise CopulaSpecError(f"Clayton theta must be > 0, got {self.theta}")
        if fam is Family.FRANK and self.theta == 0.0:
            raise CopulaSpecError("Frank theta must be nonzero")
        if abs(theta_to_tau(fam, self.theta) - self.tau) > _TAU_THETA_ATOL[fam]:
            raise CopulaSpecError(
                f"inconsistent (theta, tau) = ({self.theta}, {self.tau}) for {fam.value}"
            )

    @classmethod
    def independence(cls) -> "CopulaSpec":
        return cls(Family.INDEPENDENCE, 0.0, 0.0)

    @classmethod
    def from_theta(cls, family, theta: float) -> "CopulaSpec":
        family = Family(family)
        if family is Family.INDEPENDENCE:
            return cls.independence()
        return cls(family, float(theta), theta_to_tau(family, theta))

    @classmethod
    def from_tau(cls, family, tau: float) -> "CopulaSpec":
        family = Family(family)
        if family is Family.INDEPENDENCE:
            return cls.independence()
        return cls(family, tau_to_theta(family, tau), float(tau))


def generator(spec: CopulaSpec, u) -> np.ndarray | float:
    """Evaluate the generator phi(u) for u in (0, 1]."""
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0.0) or np.any(u > 1.0):
        raise ValueError("generator argument must lie in (0, 1]")
    if spec.family is Family.INDEPENDENCE:
        out = -np.log(u)
    elif spec.family is Family.CLAYTON:
        out = (u ** (-spec.theta) - 1.0) / spec.theta
    else:
        th = spec.theta
        out = -np.log(np.expm1(-th * u) / np.expm1(-th))
    return out if out.ndim else float(out)


def generator_inverse(spec: CopulaSpec, y) -> np.ndarray | float:
    """Evaluate phi^{-1}(y) for y >= 0 (y = +inf maps to 0)."""
    y = np.asarray(y, dtype=float)
    if np.any(y < 0.0):
        raise ValueError("generator_inverse argument must be >= 0")
    with np.errstate(over="ignore"):
        if spec.family is Family.INDEPENDENCE:
            out = np.exp(-y)
        elif spec.family is Family.CLAYTON:
            out = (1.0 + spec.theta * y) ** (-1.0 / spec.theta)
        else:
            th = spec.theta
            out = -np.log1p(np.exp(-y) * np.expm1(-th)) / th
    out = np.where(np.isinf(y), 0.0, out)
    return out if out.ndim else float(out)


def _debye1(theta: float) -> float:
    """Order-1 Debye function D1(theta) = (1/theta) * int_0^theta t/(e^t - 1) dt."""
    val, _ = integrate.quad(lambda t: t / math.expm1(t) if t != 0 else 1.0, 0.0, theta)
    return val / theta


def theta_to_tau(family, theta: float) -> float:
    family = Family(family)
    if family is Family.INDEPENDENCE:
        if theta != 0.0:
            raise CopulaSpecError("independence copula has theta = 0")
        return 0.0
    if family is Family.CLAYTON:
        if theta <= 0.0:
            raise CopulaSpecError(f"Clayton theta must be > 0, got {theta}")
        return theta / (theta + 2.0)
    if theta == 0.0:
        raise CopulaSpecError("Frank theta must be nonzero")
    return 1.0 - 4.0 / theta * (1.0 - _debye1(theta))


def tau_to_theta(family, tau: float) -> float:
    family = Family(family)
    if not 0.0 < tau < 1.0:
        raise ValueError(f"tau must lie in (0, 1), got {tau}")
    if family is Family.INDEPENDENCE:
        raise CopulaSpecError("independence copula has no dependence parameter")
    if family is Family.CLAYTON:
        return 2.0 * tau / (1.0 - tau)
    # Frank: bracketed root search on the Debye relation.
    lo, hi = 1e-8, 1.0
    while theta_to_tau(Family.FRANK, hi) < tau:
        hi *= 2.0
        if hi > 1e8:
            raise ValueError(f"no Frank theta found for tau = {tau}")
    return optimize.brentq(
        lambda th: theta_to_tau(Family.FRANK, th) - tau, lo, hi, xtol=1e-10, rtol=1e-15
    )


def sample_pairs(spec: CopulaSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw n (U, V) pairs with Uniform(0,1) marginals coupled by ``spec``.

    Conditional-distribution inversion: U and an auxiliary W are uniform and the
    conditional distribution of V given U is inverted in closed form. Boundary
    draws (0 or 1 after floating-point underflow) are resampled.

    Returns an (n, 2) array.
    """
    out = np.empty((n, 2))
    need = np.ones(n, dtype=bool)
    for _ in range(100):
        if not need.any():
            break
        k = int(need.sum())
        u = rng.random(k)
        w = rng.random(k)
        v = _conditional_inverse(spec, u, w)
        pairs = np.column_stack([u, v])
        ok = np.all((pairs > 0.0) & (pairs < 1.0), axis=1)
        idx = np.flatnonzero(need)[ok]
        out[idx] = pairs[ok]
        need[idx] = False
    if need.any():
        raise RuntimeError("copula sampling failed to produce interior pairs")
    return out


def _conditional_inverse(spec: CopulaSpec, u: np.ndarray, w: np.ndarray) -> np.ndarray:
    if spec.family is Family.INDEPENDENCE:
        return w
    th = spec.theta
    if spec.family is Family.CLAYTON:
        return (1.0 + (w ** (-th / (1.0 + th)) - 1.0) * u ** (-th)) ** (-1.0 / th)
    # Frank: invert dC/du at w.
    eu = np.exp(-th * u)
    return -np.log1p(-w * np.expm1(-th) / (w * (eu - 1.0) - eu)) / th
