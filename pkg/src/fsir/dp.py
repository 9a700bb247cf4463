"""Differential-privacy machinery: sensitivity, minimal sample sizes, the
i.i.d. Gaussian mechanism, the vectorized Gaussian mechanism whose noise
eigenbasis follows the signal's left singular basis, and the symmetric
covariance perturbation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import CovarianceEstimate, SliceMeanMatrix
from .errors import InvalidInputError
from .numerics import svd, symmetric_gaussian

__all__ = [
    "PrivacyBudget",
    "VgmNoiseSpec",
    "ClientUpload",
    "l2_sensitivity",
    "min_sample_size",
    "budget_check",
    "iid_gaussian_mechanism",
    "iid_noise_variance",
    "vgm_noise_floor",
    "vgm_mechanism",
    "covariance_noise_sd",
    "private_covariance",
]


@dataclass(frozen=True)
class PrivacyBudget:
    """(epsilon, delta) level plus the truncation level governing sensitivity."""

    epsilon: float
    delta: float
    r: float

    def __post_init__(self):
        if self.epsilon <= 0:
            raise InvalidInputError("epsilon must be positive")
        if not 0 < self.delta < 1:
            raise InvalidInputError("delta must lie in (0, 1)")
        if self.r <= 0:
            raise InvalidInputError("truncation level must be positive")


@dataclass(frozen=True)
class VgmNoiseSpec:
    """Noise covariance basis * diag(eigvals) * basis^T with eigvals >= floor."""

    basis: np.ndarray
    eigvals: np.ndarray
    floor: float

    def covariance(self) -> np.ndarray:
        return (self.basis * self.eigvals) @ self.basis.T


@dataclass(frozen=True)
class ClientUpload:
    """What one client releases: perturbed slice means, perturbed covariance, n."""

    m_tilde: np.ndarray
    sigma_tilde: np.ndarray
    n: int
    mechanism: str
    d_hat: int | None = None


def l2_sensitivity(p: int, n: int, r: float) -> float:
    """Worst-case l2 change of the truncated slice mean matrix under one record swap."""
    if p < 1 or n < 1 or r <= 0:
        raise InvalidInputError("need p >= 1, n >= 1, r > 0")
    return 2.0 * r * math.sqrt(p) / n


def min_sample_size(budget: PrivacyBudget, p: int, sigma0: float) -> int:
    """Smallest client size keeping the i.i.d. noise sd at or below sigma0."""
    if sigma0 <= 0:
        raise InvalidInputError("sigma0 must be positive")
    raw = 2.0 * budget.r * math.sqrt(2.0 * p * math.log(1.25 / budget.delta))
    return max(1, math.ceil(raw / (sigma0 * budget.epsilon)))


def budget_check(n: int, budget: PrivacyBudget, p: int, sigma0: float) -> bool:
    """True iff a client of size n may upload under the budget."""
    return n >= min_sample_size(budget, p, sigma0)


def iid_noise_variance(budget: PrivacyBudget, p: int, n: int) -> float:
    """Per-entry variance of the i.i.d. Gaussian mechanism."""
    delta2 = l2_sensitivity(p, n, budget.r)
    return 2.0 * delta2**2 * math.log(1.25 / budget.delta) / budget.epsilon**2


def iid_gaussian_mechanism(
    m_bar: SliceMeanMatrix, budget: PrivacyBudget, rng: np.random.Generator
) -> np.ndarray:
    """Slice mean matrix plus i.i.d. Gaussian noise calibrated to its sensitivity.

    Columns get independent draws; no budget splitting across slices is
    needed because a record lives in exactly one slice.
    """
    p, h = m_bar.m.shape
    sd = math.sqrt(iid_noise_variance(budget, p, m_bar.n))
    return m_bar.m + rng.normal(0.0, sd, size=(p, h))


def vgm_noise_floor(budget: PrivacyBudget, p: int, n: int, bound: str = "approx") -> float:
    """Minimal admissible noise eigenvalue for the vectorized mechanism.

    bound="approx" uses 8 r^2 p log(2/delta) / (n^2 eps^2); bound="exact"
    inverts the exact sufficient condition on the inverse-covariance norm
    instead of its second-order approximation.
    """
    if n < 1:
        raise InvalidInputError("n must be positive")
    delta2 = l2_sensitivity(p, n, budget.r)
    log_term = math.log(2.0 / budget.delta)
    if bound == "approx":
        return 2.0 * delta2**2 * log_term / budget.epsilon**2
    if bound == "exact":
        eps = budget.epsilon
        denom = 4.0 * log_term + 2.0 * eps - 4.0 * math.sqrt(log_term**2 + log_term * eps)
        return delta2**2 / denom
    raise InvalidInputError(f"unknown bound {bound!r}")


def vgm_mechanism(
    m_bar: SliceMeanMatrix,
    budget: PrivacyBudget,
    rng: np.random.Generator,
    bound: str = "approx",
) -> tuple[np.ndarray, int, VgmNoiseSpec]:
    """Perturb the slice mean matrix with noise aligned to its left singular basis.

    The noise covariance is W diag(v) W^T where W is the full left
    singular basis of m_bar, v_j = floor + gap_j for the leading
    directions up to the estimated structure dimension (largest singular
    value gap, smallest index on ties) and v_j = floor elsewhere.
    """
    p, h = m_bar.m.shape
    if p < 2:
        raise InvalidInputError("need p >= 2 for the vectorized mechanism")
    floor = vgm_noise_floor(budget, p, m_bar.n, bound=bound)
    w, s, _ = svd(m_bar.m, full_matrices=True)
    rank = min(p, h)
    if rank >= 2:
        gaps = s[: rank - 1] - s[1:rank]
        d_hat = int(np.argmax(gaps)) + 1
        extras = gaps[:d_hat]
    else:
        # single-column release: the only gap is s_1 - 0
        d_hat = 1
        extras = s[:1]
    v = np.full(p, floor)
    v[:d_hat] += extras
    z = rng.standard_normal(size=(p, h))
    e0 = (w * np.sqrt(v)) @ z
    return m_bar.m + e0, d_hat, VgmNoiseSpec(basis=w, eigvals=v, floor=floor)


def covariance_noise_sd(p: int, n: int, epsilon: float, delta: float) -> float:
    """Entry sd of the symmetric perturbation for a unit-row-norm covariance."""
    if epsilon <= 0 or not 0 < delta < 1:
        raise InvalidInputError("invalid covariance budget")
    lead = (p + 1) / (n * epsilon)
    log_arg = (p**2 + p) / (2.0 * math.sqrt(2.0 * math.pi) * delta)
    return lead * math.sqrt(2.0 * math.log(log_arg)) + 1.0 / (n * math.sqrt(epsilon))


def private_covariance(
    cov: CovarianceEstimate,
    budget: PrivacyBudget,
    rng: np.random.Generator,
    rescale: bool = True,
) -> np.ndarray:
    """Release the covariance with a symmetric Gaussian perturbation.

    With rescale=True (default) the mechanism is applied to sigma / c_r^2,
    whose rows have norm at most one, and mapped back: the output is
    sigma + c_r^2 * A.  rescale=False adds A at unit scale, which treats
    the truncated rows as if they were norm-bounded by one; that is the
    calibration the simulation tables correspond to, but its formal
    privacy guarantee only covers row norms up to one.
    """
    if cov.c_r <= 0:
        raise InvalidInputError("c_r must be positive")
    p = cov.sigma.shape[0]
    sd = covariance_noise_sd(p, cov.n, budget.epsilon, budget.delta)
    a = symmetric_gaussian(rng, p, sd)
    scale = cov.c_r**2 if rescale else 1.0
    return cov.sigma + scale * a
