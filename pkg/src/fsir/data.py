"""Per-client labeled data: slicing of a continuous response, entrywise
truncation, slice mean matrices and covariance estimates."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .errors import DegenerateDataError, InvalidInputError

__all__ = [
    "LabeledDataset",
    "SliceMeanMatrix",
    "CovarianceEstimate",
    "slice_response",
    "truncate",
    "slice_mean_matrix",
    "covariance_estimate",
    "read_csv",
    "write_csv",
]


@dataclass(frozen=True)
class LabeledDataset:
    """n x p covariate matrix with one slice label in 1..h per sample."""

    x: np.ndarray
    labels: np.ndarray
    h: int
    y: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        labels = np.asarray(self.labels, dtype=int)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "labels", labels)
        if x.ndim != 2 or x.shape[0] < 1:
            raise InvalidInputError(f"x must be a non-empty 2-D matrix, got shape {x.shape}")
        if labels.shape != (x.shape[0],):
            raise InvalidInputError("labels must have one entry per sample")
        if self.h < 1:
            raise InvalidInputError("slice count must be positive")
        if labels.min() < 1 or labels.max() > self.h:
            raise InvalidInputError(f"labels must lie in 1..{self.h}")

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]


@dataclass(frozen=True)
class SliceMeanMatrix:
    """p x h matrix of truncated slice means, divided by the total sample count."""

    m: np.ndarray
    n: int
    r: float


@dataclass(frozen=True)
class CovarianceEstimate:
    """Second-moment matrix of the truncated design plus its max row norm."""

    sigma: np.ndarray
    c_r: float
    n: int


def slice_response(y: np.ndarray, h: int) -> np.ndarray:
    """Equal-frequency slice labels for a continuous response.

    The sample of rank r (0-based, ties broken by original index) gets
    label floor(r*h/n) + 1, so slice sizes differ by at most one.
    """
    y = np.asarray(y, dtype=float)
    n = y.shape[0]
    if h < 2:
        raise InvalidInputError("slice count must be at least 2")
    if n < h:
        raise InvalidInputError(f"need at least {h} samples to build {h} slices, got {n}")
    order = np.argsort(y, kind="stable")
    ranks = np.empty(n, dtype=np.int64)
    ranks[order] = np.arange(n)
    return (ranks * h // n + 1).astype(int)


def fixed_break_labels(y: np.ndarray, breaks: np.ndarray, h: int) -> np.ndarray:
    """Slice labels from a shared partition: label = 1 + #{breaks < y}."""
    breaks = np.asarray(breaks, dtype=float)
    if len(breaks) != h - 1:
        raise InvalidInputError(f"{h} slices need {h - 1} break points, got {len(breaks)}")
    return (np.searchsorted(breaks, np.asarray(y, dtype=float), side="left") + 1).astype(int)


def truncate(x: np.ndarray, r: float) -> np.ndarray:
    """Entrywise projection onto [-r, r]."""
    if r <= 0:
        raise InvalidInputError("truncation level must be positive")
    x = np.asarray(x, dtype=float)
    if np.all(np.abs(x) <= r):
        return x
    return np.clip(x, -r, r)


def slice_mean_matrix(d: LabeledDataset, r: float) -> SliceMeanMatrix:
    """Truncated slice mean matrix: column h is (1/n) sum_i clip(x_i) 1(label_i = h).

    The divisor is the total sample count n, not the slice size, so the
    slice probabilities never have to be released separately.
    """
    xt = truncate(d.x, r)
    m = np.zeros((d.p, d.h))
    for h in range(1, d.h + 1):
        mask = d.labels == h
        if mask.any():
            m[:, h - 1] = xt[mask].sum(axis=0) / d.n
    return SliceMeanMatrix(m=m, n=d.n, r=r)


def covariance_estimate(d: LabeledDataset, r: float, center: bool = False) -> CovarianceEstimate:
    """Second-moment matrix (1/n) X^T X of the truncated design.

    No mean subtraction by default (the synthetic generators produce
    mean-zero covariates); pass center=True for ingested real data, in
    which case the client mean is removed before truncation.
    """
    x = d.x
    if center:
        x = x - x.mean(axis=0, keepdims=True)
    xt = truncate(x, r)
    c_r = float(np.linalg.norm(xt, axis=1).max())
    if c_r == 0.0:
        raise DegenerateDataError("all-zero design matrix after truncation")
    sigma = xt.T @ xt / d.n
    sigma = (sigma + sigma.T) / 2.0
    return CovarianceEstimate(sigma=sigma, c_r=c_r, n=d.n)


def read_csv(
    path,
    response: str,
    h: int,
    center: bool = False,
    breaks: np.ndarray | None = None,
) -> LabeledDataset:
    """Load a client dataset from CSV (header row, one named response column).

    A numeric response is sliced into h equal-frequency slices on local
    quantiles unless explicit break points are supplied. Responses that
    already take integer values in 1..h are used as labels directly.
    """
    frame = pd.read_csv(path)
    if response not in frame.columns:
        raise InvalidInputError(f"response column {response!r} not found in {path}")
    y = frame[response].to_numpy(dtype=float)
    x = frame.drop(columns=[response]).to_numpy(dtype=float)
    if center:
        x = x - x.mean(axis=0, keepdims=True)
    if breaks is not None:
        labels = fixed_break_labels(y, breaks, h)
    else:
        as_int = y.astype(int)
        if np.all(as_int == y) and as_int.min() >= 1 and as_int.max() <= h:
            labels = as_int
        else:
            labels = slice_response(y, h)
    return LabeledDataset(x=x, labels=labels, h=h, y=y)


def write_csv(d: LabeledDataset, path, response: str = "y") -> None:
    """Dump a dataset in the format read_csv ingests."""
    y = d.y if d.y is not None else d.labels
    cols = {f"x{j + 1}": d.x[:, j] for j in range(d.p)}
    cols[response] = y
    pd.DataFrame(cols).to_csv(path, index=False)
