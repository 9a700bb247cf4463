"""Synthetic data generators for the five benchmark models, in both the
low-dimensional and sparse high-dimensional regimes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import LabeledDataset, slice_response
from .errors import InvalidInputError
from .numerics import sym_eig

__all__ = ["ModelSpec", "ar1_covariance", "make_beta", "make_model", "generate", "make_dataset"]

MODELS = ("I", "II", "III", "IV", "V")


@dataclass(frozen=True)
class ModelSpec:
    """Everything needed to sample one benchmark model: the true basis, the
    covariate covariance structure, and the sparsity bookkeeping."""

    model: str
    p: int
    beta: np.ndarray
    sparse: bool = False
    s: int | None = None
    binary: bool = False

    @property
    def d(self) -> int:
        return self.beta.shape[1]


def ar1_covariance(p: int, rho: float = 0.5) -> np.ndarray:
    idx = np.arange(p)
    return rho ** np.abs(idx[:, None] - idx[None, :])


_ROOT_CACHE: dict = {}


def _sqrt_psd(sigma: np.ndarray) -> np.ndarray:
    w, v = sym_eig(sigma)
    return v @ np.diag(np.sqrt(np.clip(w, 0.0, None))) @ v.T


def _ar1_root(p: int, rho: float = 0.5) -> np.ndarray:
    key = (p, rho)
    if key not in _ROOT_CACHE:
        _ROOT_CACHE[key] = _sqrt_psd(ar1_covariance(p, rho))
    return _ROOT_CACHE[key]


def sparsity_for(p: int) -> int:
    """Active-set size convention for the sparse regime."""
    return 5 if p <= 500 else 10


def make_beta(model: str, p: int, rng: np.random.Generator, sparse: bool = False) -> np.ndarray:
    """The true basis construction for each model.

    Low dimension: models I-II draw Unif(0.4, 0.8) loadings on all p
    coordinates; models III-V use the first-five / last-five indicator
    split. Sparse regime: I-II load Unif(0.4, 0.8) on the first s
    coordinates; III-V put beta_1 on 1..ceil(s/2) and beta_2 on
    s-ceil(s/2)..s. Columns are normalized to unit length.
    """
    if model not in MODELS:
        raise InvalidInputError(f"unknown model {model!r}")
    if sparse:
        s = sparsity_for(p)
        if p < s:
            raise InvalidInputError(f"p={p} below sparsity {s}")
        if model in ("I", "II"):
            b1 = np.zeros(p)
            b1[:s] = rng.uniform(0.4, 0.8, size=s)
            cols = [b1]
        else:
            s0 = -(-s // 2)
            b1 = np.zeros(p)
            b1[:s0] = 1.0
            b2 = np.zeros(p)
            b2[s - s0 - 1 : s] = 1.0  # 1-based support s-s0..s
            cols = [b1, b2]
    else:
        if p < 10:
            raise InvalidInputError("low-dimensional construction needs p >= 10")
        if model in ("I", "II"):
            cols = [rng.uniform(0.4, 0.8, size=p)]
        else:
            b1 = np.zeros(p)
            b1[:5] = 1.0
            b2 = np.zeros(p)
            b2[5:] = 1.0
            cols = [b1, b2]
    beta = np.column_stack([c / np.linalg.norm(c) for c in cols])
    return beta


def make_model(model: str, p: int, rng: np.random.Generator, sparse: bool = False) -> ModelSpec:
    beta = make_beta(model, p, rng, sparse=sparse)
    return ModelSpec(
        model=model,
        p=p,
        beta=beta,
        sparse=sparse,
        s=sparsity_for(p) if sparse else None,
        binary=(model == "I"),
    )


def generate(
    spec: ModelSpec,
    n: int,
    rng: np.random.Generator,
    model1: str = "bernoulli",
    noise_scale: float = 1.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Sample (x, y) from the model.

    model1 chooses between Bernoulli draws from the logistic probability
    (default) and the deterministic threshold 1(beta^T x > 0).
    noise_scale rescales the additive noise (0 gives the noiseless
    structural check for model V).
    """
    if n < 1:
        raise InvalidInputError("n must be positive")
    p = spec.p
    m = spec.model
    if m == "V":
        y = rng.standard_normal(n)
        f = np.column_stack([y, y**2])
        x = f @ spec.beta.T + noise_scale * rng.standard_normal((n, p))
        return x, y
    if m in ("II", "IV"):
        x = rng.standard_normal((n, p)) @ _ar1_root(p).T
    else:
        x = rng.standard_normal((n, p))
    u1 = x @ spec.beta[:, 0]
    if m == "I":
        if model1 == "bernoulli":
            prob = 1.0 / (1.0 + np.exp(-u1))
            y = (rng.random(n) < prob).astype(float)
        elif model1 == "threshold":
            y = (u1 > 0).astype(float)
        else:
            raise InvalidInputError(f"unknown model1 variant {model1!r}")
        return x, y
    eps = noise_scale * rng.standard_normal(n)
    if m == "II":
        y = 1.0 / (0.5 + (u1 + 1.0) ** 2) + eps
    elif m == "III":
        u2 = x @ spec.beta[:, 1]
        y = u1 / (u2**3 + 1.0) + eps
    else:  # IV
        u2 = x @ spec.beta[:, 1]
        y = np.sin(u1) * np.exp(u2 + eps)
    return x, y


def make_dataset(
    spec: ModelSpec, n: int, h: int, rng: np.random.Generator, model1: str = "bernoulli"
) -> LabeledDataset:
    """Sample a model and attach slice labels: the binary response labels
    itself (two slices); continuous responses get h equal-frequency
    slices on local quantiles."""
    x, y = generate(spec, n, rng, model1=model1)
    if spec.binary:
        return LabeledDataset(x=x, labels=y.astype(int) + 1, h=2, y=y)
    return LabeledDataset(x=x, labels=slice_response(y, h), h=h, y=y)
