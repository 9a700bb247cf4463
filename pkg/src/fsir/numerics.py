"""Deterministic numerical kernel: SVD, symmetric eigendecomposition,
SPD solves with ridge escalation, and seedable Gaussian samplers.

All decompositions apply a fixed sign convention (the largest-magnitude
entry of every left singular vector / eigenvector is made positive) so
outputs are bit-deterministic functions of the input.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import InvalidInputError, SingularMatrixError

__all__ = [
    "make_rng",
    "client_stream",
    "svd",
    "sym_eig",
    "solve_spd",
    "gaussian_matrix",
    "symmetric_gaussian",
]


def make_rng(seed: int, stream_id: int = 0) -> np.random.Generator:
    """Independent generator for (seed, stream_id).

    Identical arguments always yield the identical draw sequence, so
    parallel units of work that own distinct stream ids are reproducible
    regardless of execution order.
    """
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(stream_id,)))


def client_stream(seed: int, replication: int, client: int) -> np.random.Generator:
    """Per-(replication, client) generator, order-independent under parallelism."""
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(replication, client))
    )


def _check_finite(m: np.ndarray, name: str = "matrix") -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2:
        raise InvalidInputError(f"{name} must be 2-D, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return m


def _fix_signs(u: np.ndarray, vt: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray | None]:
    """Flip column signs so the largest-magnitude entry of each column of u is positive."""
    u = u.copy()
    vt = None if vt is None else vt.copy()
    for j in range(u.shape[1]):
        i = int(np.argmax(np.abs(u[:, j])))
        if u[i, j] < 0:
            u[:, j] = -u[:, j]
            if vt is not None and j < vt.shape[0]:
                vt[j, :] = -vt[j, :]
    return u, vt


def svd(m: np.ndarray, full_matrices: bool = False) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Singular value decomposition with deterministic signs.

    Returns (u, s, vt) with singular values sorted descending and the
    sign convention applied to the columns of u (matching rows of vt are
    flipped together, so u @ diag(s) @ vt reconstructs m).
    """
    m = _check_finite(m)
    u, s, vt = np.linalg.svd(m, full_matrices=full_matrices)
    u, vt = _fix_signs(u, vt)
    return u, s, vt


def sym_eig(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix, eigenvalues descending.

    The input is symmetrized internally; the same sign convention as
    :func:`svd` is applied to the eigenvectors.
    """
    m = _check_finite(m)
    if m.shape[0] != m.shape[1]:
        raise InvalidInputError(f"matrix must be square, got shape {m.shape}")
    sym = (m + m.T) / 2.0
    w, v = np.linalg.eigh(sym)
    w = w[::-1]
    v = v[:, ::-1]
    v, _ = _fix_signs(v)
    return w, v


def solve_spd(a: np.ndarray, b: np.ndarray, ridge: float = 0.0) -> np.ndarray:
    """Solve (a + ridge*I) x = b via Cholesky, escalating the ridge if needed.

    If the factorization fails, the ridge is raised by decade steps from
    1e-10*trace(a)/p up to 1e-2*trace(a)/p before giving up.
    """
    a = _check_finite(a, "a")
    b = np.asarray(b, dtype=float)
    if a.shape[0] != a.shape[1]:
        raise InvalidInputError(f"a must be square, got shape {a.shape}")
    if b.shape[0] != a.shape[0]:
        raise InvalidInputError("row counts of a and b differ")
    if ridge < 0:
        raise InvalidInputError("ridge must be non-negative")

    p = a.shape[0]
    a = (a + a.T) / 2.0
    scale = max(np.trace(a) / p, np.finfo(float).tiny)
    tried = ridge
    ladder = [ridge] + [scale * 10.0**k for k in range(-10, -1)]
    for r in ladder:
        if r < ridge:
            continue
        tried = r
        try:
            c, low = scipy.linalg.cho_factor(a + r * np.eye(p), check_finite=False)
            return scipy.linalg.cho_solve((c, low), b, check_finite=False)
        except np.linalg.LinAlgError:
            continue
        except scipy.linalg.LinAlgError:  # pragma: no cover - alias on some versions
            continue
    raise SingularMatrixError(
        f"matrix not positive definite after ridge escalation (last ridge {tried:g})", tried
    )


def gaussian_matrix(
    rng: np.random.Generator, rows: int, cols: int, mean: float = 0.0, sd: float = 1.0
) -> np.ndarray:
    """rows x cols matrix of i.i.d. N(mean, sd^2) entries."""
    if sd <= 0:
        raise InvalidInputError("sd must be positive")
    return rng.normal(loc=mean, scale=sd, size=(rows, cols))


def symmetric_gaussian(rng: np.random.Generator, p: int, sd: float) -> np.ndarray:
    """Symmetric p x p matrix whose on-and-above-diagonal entries are i.i.d. N(0, sd^2).

    The lower triangle mirrors the upper one, so the output is exactly
    symmetric.
    """
    if sd <= 0:
        raise InvalidInputError("sd must be positive")
    upper = np.triu(rng.normal(0.0, sd, size=(p, p)))
    return upper + np.triu(upper, 1).T
