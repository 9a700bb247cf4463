"""Collaborative variable screening: per-client slice-wise thresholding of
conditional-mean magnitudes, multiset votes, and server-side majority voting.

Covariate indices in votes and active sets are 1-based.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .data import LabeledDataset, truncate
from .errors import InvalidInputError, ScreeningDegenerateError

__all__ = [
    "ClientVote",
    "ActiveSet",
    "ccmd_matrix",
    "ccmd_client",
    "ccmd_aggregate",
    "restrict_dataset",
]


@dataclass(frozen=True)
class ClientVote:
    """Multiset of flagged covariate indices; a variable may be flagged by
    several slices of the same client."""

    counts: Counter
    empty_slices: int = 0

    def indices(self) -> list[int]:
        return sorted(self.counts)


@dataclass(frozen=True)
class ActiveSet:
    """Sorted distinct covariate indices (1-based)."""

    indices: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(sorted(set(int(j) for j in self.indices)))
        object.__setattr__(self, "indices", idx)
        if idx and idx[0] < 1:
            raise InvalidInputError("indices must be 1-based positive integers")

    def __len__(self) -> int:
        return len(self.indices)

    def as_zero_based(self) -> np.ndarray:
        return np.asarray(self.indices, dtype=int) - 1


def ccmd_matrix(d: LabeledDataset, r: float) -> np.ndarray:
    """p x h matrix of absolute within-slice truncated means.

    Entry (j, h) is |mean of clipped X_j over the samples in slice h|; the
    divisor is the slice size, so this is a conditional mean, unlike the
    slice mean matrix whose divisor is the total sample count. Empty
    slices yield zero columns.
    """
    xt = truncate(d.x, r)
    omega = np.zeros((d.p, d.h))
    for h in range(1, d.h + 1):
        mask = d.labels == h
        if mask.any():
            omega[:, h - 1] = np.abs(xt[mask].mean(axis=0))
    return omega


def ccmd_client(
    d: LabeledDataset, r: float, t: float | None = None, gamma: float = 0.05
) -> ClientVote:
    """One client's screening vote: indices whose conditional-mean magnitude
    exceeds the threshold, counted once per slice that flags them.

    When t is None the threshold is the (1 - gamma)-quantile of all
    magnitudes on this client, a data-driven default for when the
    theoretical constants are unknown.
    """
    if t is not None and t <= 0:
        raise InvalidInputError("threshold must be positive")
    if not 0 < gamma < 1:
        raise InvalidInputError("gamma must lie in (0, 1)")
    omega = ccmd_matrix(d, r)
    if t is None:
        t = float(np.quantile(omega, 1.0 - gamma))
    empty = int(sum(1 for h in range(1, d.h + 1) if not (d.labels == h).any()))
    counts: Counter = Counter()
    for h in range(d.h):
        flagged = np.nonzero(omega[:, h] > t)[0]
        counts.update(int(j) + 1 for j in flagged)
    return ClientVote(counts=counts, empty_slices=empty)


def ccmd_aggregate(votes: list[ClientVote], k: int, vote_unit: str = "client") -> ActiveSet:
    """Majority vote over client multisets: keep j with multiplicity > k/2.

    vote_unit="client" counts each index at most once per client (the
    binomial analysis behind the majority rule reads per client);
    vote_unit="slice" sums raw slice-level multiplicities.
    """
    if not votes:
        raise InvalidInputError("votes must be nonempty")
    if k != len(votes):
        raise InvalidInputError("k must equal the number of votes")
    pooled: Counter = Counter()
    for vote in votes:
        if vote_unit == "client":
            pooled.update(vote.counts.keys())
        elif vote_unit == "slice":
            pooled.update(vote.counts)
        else:
            raise InvalidInputError(f"unknown vote_unit {vote_unit!r}")
    kept = [j for j, mult in pooled.items() if mult > k / 2.0]
    return ActiveSet(indices=tuple(sorted(kept)))


def restrict_dataset(d: LabeledDataset, a: ActiveSet) -> LabeledDataset:
    """Column-subset copy of a dataset, preserving sample order and labels."""
    if len(a) == 0:
        raise ScreeningDegenerateError("active set is empty")
    if a.indices[-1] > d.p:
        raise InvalidInputError(f"active index {a.indices[-1]} exceeds dimension {d.p}")
    return LabeledDataset(x=d.x[:, a.as_zero_based()], labels=d.labels, h=d.h, y=d.y)
