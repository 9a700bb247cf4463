"""Subspace accuracy metrics and the tracing (membership-inference) attack
with ROC/AUC evaluation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd
import scipy.linalg

from .data import LabeledDataset, SliceMeanMatrix, truncate
from .dp import PrivacyBudget, iid_gaussian_mechanism, vgm_mechanism
from .errors import InvalidInputError

__all__ = [
    "RocCurve",
    "projection_loss",
    "subspace_angle",
    "roc_curve",
    "tracing_attack_score",
    "tracing_experiment",
]


@dataclass(frozen=True)
class RocCurve:
    """ROC points sorted by false positive rate, with the trapezoidal AUC."""

    points: np.ndarray
    auc: float

    def to_csv(self, path) -> None:
        pd.DataFrame(self.points, columns=["fpr", "tpr"]).to_csv(path, index=False)

    @staticmethod
    def from_csv(path) -> "RocCurve":
        pts = pd.read_csv(path)[["fpr", "tpr"]].to_numpy(dtype=float)
        return RocCurve(points=pts, auc=float(np.trapz(pts[:, 1], pts[:, 0])))


def _projector(b: np.ndarray) -> np.ndarray:
    b = np.atleast_2d(np.asarray(b, dtype=float))
    if b.shape[0] == 1:
        b = b.T
    q, r = np.linalg.qr(b)
    diag = np.abs(np.diag(r))
    if diag.min() <= 1e-12 * max(diag.max(), 1.0):
        raise InvalidInputError("basis is rank deficient")
    return q @ q.T


def projection_loss(b1: np.ndarray, b2: np.ndarray) -> float:
    """Frobenius distance between the orthogonal projectors onto the two
    column spans; invariant to basis choice and scale."""
    return float(np.linalg.norm(_projector(b1) - _projector(b2), "fro"))


def subspace_angle(b1: np.ndarray, b2: np.ndarray) -> float:
    """Angle in [0, pi/2] between two directions, or the largest principal
    angle between two subspaces."""
    b1 = np.atleast_2d(np.asarray(b1, dtype=float))
    b2 = np.atleast_2d(np.asarray(b2, dtype=float))
    if b1.shape[0] == 1:
        b1 = b1.T
    if b2.shape[0] == 1:
        b2 = b2.T
    if np.linalg.norm(b1) == 0 or np.linalg.norm(b2) == 0:
        raise InvalidInputError("zero basis")
    if b1.shape[1] == 1 and b2.shape[1] == 1:
        v1 = b1[:, 0] / np.linalg.norm(b1[:, 0])
        v2 = b2[:, 0] / np.linalg.norm(b2[:, 0])
        return float(np.arccos(min(1.0, abs(float(v1 @ v2)))))
    return float(np.max(scipy.linalg.subspace_angles(b1, b2)))


def roc_curve(scores: np.ndarray, labels: np.ndarray) -> RocCurve:
    """ROC over all distinct thresholds of the scores; labels are 1 for
    members and 0 for non-members. Tied scores are grouped, so the AUC
    equals the tie-corrected rank statistic."""
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=int)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise InvalidInputError("scores and labels must be equal-length vectors")
    n_pos = int(labels.sum())
    n_neg = int(labels.size - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise InvalidInputError("both classes must be present")
    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    l = labels[order]
    # group tied scores so the curve steps once per distinct threshold
    boundary = np.nonzero(np.diff(s))[0]
    cut = np.concatenate([boundary + 1, [s.size]])
    tp = np.cumsum(l)[cut - 1]
    fp = cut - tp
    tpr = np.concatenate([[0.0], tp / n_pos, [1.0]])
    fpr = np.concatenate([[0.0], fp / n_neg, [1.0]])
    pts = np.column_stack([fpr, tpr])
    auc = float(np.trapz(pts[:, 1], pts[:, 0]))
    return RocCurve(points=pts, auc=auc)


def tracing_attack_score(
    x0: np.ndarray, y0: int, beta_hat: np.ndarray, beta_ref: np.ndarray
) -> float:
    """Inner product of the sample's signed contribution, recentered by a
    reference direction, with the released discriminant direction."""
    if y0 not in (0, 1):
        raise InvalidInputError("y0 must be binary")
    sign = 1.0 if y0 == 1 else -1.0
    return float((sign * np.asarray(x0, dtype=float) - beta_ref) @ np.asarray(beta_hat))


def _signed_mean(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    signs = np.where(y == 1, 1.0, -1.0)
    return (signs[:, None] * x).mean(axis=0)


def tracing_experiment(
    d: LabeledDataset,
    estimator: str,
    budget: PrivacyBudget,
    rng: np.random.Generator,
) -> RocCurve:
    """Run the tracing attack against one release of the discriminant
    direction.

    One held-out sample provides the reference direction; the rest is
    split into equal member and non-member halves. The direction is the
    signed mean over the member half, released raw or perturbed as a
    single p-dimensional mean with the chosen mechanism, and every sample
    in both halves is scored against it.
    """
    if estimator not in ("raw", "iid", "vgm"):
        raise InvalidInputError(f"unknown estimator {estimator!r}")
    if d.n < 20:
        raise InvalidInputError("need at least 20 samples")
    y = d.labels - d.labels.min()  # map {1,2} to {0,1}
    x = truncate(d.x, budget.r)

    perm = rng.permutation(d.n)
    ref_i = perm[0]
    rest = perm[1:]
    half = rest.size // 2
    members = rest[:half]
    outsiders = rest[half : 2 * half]

    sign_ref = 1.0 if y[ref_i] == 1 else -1.0
    beta_ref = sign_ref * x[ref_i]
    beta_hat = _signed_mean(x[members], y[members])

    if estimator != "raw":
        release = SliceMeanMatrix(m=beta_hat[:, None], n=members.size, r=budget.r)
        if estimator == "iid":
            beta_hat = iid_gaussian_mechanism(release, budget, rng)[:, 0]
        else:
            beta_hat = vgm_mechanism(release, budget, rng)[0][:, 0]

    idx = np.concatenate([members, outsiders])
    labels = np.concatenate([np.ones(members.size, dtype=int), np.zeros(outsiders.size, dtype=int)])
    scores = np.array(
        [tracing_attack_score(x[i], int(y[i]), beta_hat, beta_ref) for i in idx]
    )
    return roc_curve(scores, labels)
