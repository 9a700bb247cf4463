"""The federated protocol: client pipelines producing uploads, server-side
sample-size-weighted merging, SVD, structure-dimension selection, and the
final subspace estimate beta = sigma^{-1} u, with the high-dimensional
screening path and index embedding."""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field, replace

import numpy as np

from .data import LabeledDataset, covariance_estimate, slice_mean_matrix
from .dp import (
    ClientUpload,
    PrivacyBudget,
    VgmNoiseSpec,
    budget_check,
    iid_gaussian_mechanism,
    private_covariance,
    vgm_mechanism,
)
from .errors import (
    ClientExcludedError,
    InvalidInputError,
    ProtocolError,
    RunError,
    ScreeningDegenerateError,
)
from .numerics import solve_spd, svd
from .screening import ActiveSet, ccmd_aggregate, ccmd_client, restrict_dataset

__all__ = [
    "ProtocolConfig",
    "ServerState",
    "SubspaceEstimate",
    "FsirResult",
    "client_delta",
    "client_pipeline",
    "server_merge",
    "select_dimension",
    "estimate_subspace",
    "embed",
    "run_fsir",
]


@dataclass(frozen=True)
class ProtocolConfig:
    """Knobs of a single protocol round.

    delta=None resolves to 1/n^1.1 per client from that client's sample
    size. mechanism "none" bypasses all perturbation (baseline runs and
    oracle checks). high_dim=None triggers screening automatically when
    p exceeds the smallest client's sample size. cov_rescale chooses
    between adding the covariance perturbation at the c_r^2 scale
    demanded by the row-norm reduction (True) or at unit scale (False,
    the calibration the reported simulation accuracy corresponds to).
    """

    r: float = 3.0
    epsilon: float = 1.0
    epsilon_x: float | None = None
    delta: float | None = None
    sigma0: float = 1.0
    mechanism: str = "vgm"
    d: int | None = None
    high_dim: bool | None = None
    threshold: float | None = None
    gamma: float = 0.05
    vote_unit: str = "client"
    vgm_bound: str = "approx"
    cov_rescale: bool = False
    ridge: float = 0.0
    on_empty_active: str = "error"

    def __post_init__(self):
        if self.mechanism not in ("iid", "vgm", "none"):
            raise InvalidInputError(f"unknown mechanism {self.mechanism!r}")
        if self.on_empty_active not in ("error", "lowdim"):
            raise InvalidInputError(f"unknown on_empty_active {self.on_empty_active!r}")


@dataclass(frozen=True)
class ServerState:
    """Sample-size-weighted merge of the accepted uploads."""

    merged_m: np.ndarray
    merged_sigma: np.ndarray
    total_n: int
    active: ActiveSet | None = None


@dataclass(frozen=True)
class SubspaceEstimate:
    """p x d basis spanning the estimated dimension-reduction subspace.

    embedding records which global coordinates the rows refer to when the
    estimate was computed on a screened subset of variables.
    """

    beta: np.ndarray
    d: int
    embedding: ActiveSet | None = None
    singular_values: np.ndarray | None = field(default=None, compare=False)


@dataclass(frozen=True)
class FsirResult:
    estimate: SubspaceEstimate
    active: ActiveSet | None
    excluded: tuple[int, ...]
    d_hat: int
    vgm_specs: tuple[VgmNoiseSpec, ...] = ()


def client_delta(config: ProtocolConfig, n: int) -> float:
    return config.delta if config.delta is not None else float(n) ** -1.1


def _checksum(m: np.ndarray) -> str:
    return f"{zlib.crc32(np.ascontiguousarray(m).tobytes()) & 0xFFFFFFFF:08x}"


def client_pipeline(
    d: LabeledDataset,
    config: ProtocolConfig,
    rng: np.random.Generator,
) -> tuple[ClientUpload, VgmNoiseSpec | None]:
    """One client's local work: estimate, perturb, bundle.

    Raises ClientExcludedError when the sample size fails the minimal
    size required by the budget (mechanism "none" skips the gate).
    """
    m_bar = slice_mean_matrix(d, config.r)
    cov = covariance_estimate(d, config.r)
    if config.mechanism == "none":
        return ClientUpload(
            m_tilde=m_bar.m, sigma_tilde=cov.sigma, n=d.n, mechanism="none"
        ), None

    delta = client_delta(config, d.n)
    budget_m = PrivacyBudget(epsilon=config.epsilon, delta=delta, r=config.r)
    eps_x = config.epsilon_x if config.epsilon_x is not None else config.epsilon
    budget_x = PrivacyBudget(epsilon=eps_x, delta=delta, r=config.r)
    if not budget_check(d.n, budget_m, d.p, config.sigma0):
        raise ClientExcludedError(
            f"client with n={d.n} below the minimal sample size for p={d.p}"
        )
    spec = None
    if config.mechanism == "iid":
        m_tilde = iid_gaussian_mechanism(m_bar, budget_m, rng)
        d_hat = None
    else:
        m_tilde, d_hat, spec = vgm_mechanism(m_bar, budget_m, rng, bound=config.vgm_bound)
    sigma_tilde = private_covariance(cov, budget_x, rng, rescale=config.cov_rescale)
    upload = ClientUpload(
        m_tilde=m_tilde,
        sigma_tilde=sigma_tilde,
        n=d.n,
        mechanism=config.mechanism,
        d_hat=d_hat,
    )
    return upload, spec


def server_merge(uploads: list[ClientUpload]) -> ServerState:
    """Sample-size-weighted average of the uploads."""
    if not uploads:
        raise ProtocolError("no uploads to merge")
    p, h = uploads[0].m_tilde.shape
    for i, u in enumerate(uploads):
        if u.m_tilde.shape != (p, h) or u.sigma_tilde.shape != (p, p):
            raise ProtocolError(f"upload {i} has mismatched dimensions")
    total_n = sum(u.n for u in uploads)
    merged_m = sum(u.n * u.m_tilde for u in uploads) / total_n
    merged_sigma = sum(u.n * u.sigma_tilde for u in uploads) / total_n
    return ServerState(merged_m=merged_m, merged_sigma=merged_sigma, total_n=total_n)


def select_dimension(singular_values: np.ndarray) -> int:
    """Largest-gap rule on descending singular values, smallest index on ties."""
    s = np.asarray(singular_values, dtype=float)
    if s.size < 2:
        return 1
    gaps = s[:-1] - s[1:]
    return int(np.argmax(gaps)) + 1


def estimate_subspace(
    state: ServerState, d: int | None = None, ridge: float = 0.0
) -> SubspaceEstimate:
    """SVD of the merged slice means, dimension selection, and the solve
    beta = merged_sigma^{-1} u on the leading left singular vectors.

    Columns are left unnormalized; all downstream subspace metrics are
    scale-invariant.
    """
    u, s, _ = svd(state.merged_m, full_matrices=False)
    d_hat = d if d is not None else select_dimension(s)
    if d_hat > u.shape[1]:
        raise InvalidInputError(f"requested dimension {d_hat} exceeds rank bound {u.shape[1]}")
    beta = solve_spd(state.merged_sigma, u[:, :d_hat], ridge=ridge)
    return SubspaceEstimate(beta=beta, d=d_hat, embedding=state.active, singular_values=s)


def embed(est: SubspaceEstimate, p_global: int) -> SubspaceEstimate:
    """Place the rows of a screened estimate at their global coordinates."""
    if est.embedding is None:
        raise InvalidInputError("estimate carries no embedding")
    idx = est.embedding.as_zero_based()
    if idx.size and idx.max() >= p_global:
        raise InvalidInputError("embedded index out of range")
    beta = np.zeros((p_global, est.d))
    beta[idx, :] = est.beta
    return SubspaceEstimate(
        beta=beta, d=est.d, embedding=est.embedding, singular_values=est.singular_values
    )


def run_fsir(
    clients: list[LabeledDataset],
    config: ProtocolConfig,
    rngs: list[np.random.Generator],
    trace=None,
) -> FsirResult:
    """One full protocol round over a fleet of clients.

    With screening on (explicit or automatic when p exceeds the smallest
    client), every client votes, the server majority-aggregates, all
    clients restrict to the active set, and the low-dimensional path runs
    on the restricted data with the estimate embedded back to p rows.
    """
    if not clients:
        raise RunError("no clients")
    if len(rngs) != len(clients):
        raise InvalidInputError("need one rng stream per client")
    p = clients[0].p
    if any(c.p != p for c in clients):
        raise ProtocolError("clients disagree on the covariate dimension")

    high_dim = config.high_dim
    if high_dim is None:
        high_dim = p > min(c.n for c in clients)

    active = None
    work = clients
    if high_dim:
        votes = [
            ccmd_client(c, config.r, t=config.threshold, gamma=config.gamma) for c in clients
        ]
        active = ccmd_aggregate(votes, len(clients), vote_unit=config.vote_unit)
        if trace is not None:
            for i, v in enumerate(votes):
                pairs = ",".join(f"{j}:{m}" for j, m in sorted(v.counts.items()))
                trace.write(f"event=screen-vote client={i} votes={pairs}\n")
            trace.write(
                "event=screen-active indices="
                + ",".join(str(j) for j in (active.indices if active else ()))
                + "\n"
            )
        if len(active) == 0:
            if config.on_empty_active == "error":
                raise ScreeningDegenerateError("screening returned an empty active set")
            active = None
        else:
            work = [restrict_dataset(c, active) for c in clients]

    uploads = []
    specs = []
    excluded = []
    for i, (c, rng) in enumerate(zip(work, rngs)):
        try:
            upload, spec = client_pipeline(c, config, rng)
        except ClientExcludedError:
            excluded.append(i)
            if trace is not None:
                trace.write(f"event=exclusion client={i} n={c.n}\n")
            continue
        uploads.append(upload)
        if spec is not None:
            specs.append(spec)
        if trace is not None:
            trace.write(
                f"event=client-upload client={i} n={upload.n} "
                f"m={_checksum(upload.m_tilde)} sigma={_checksum(upload.sigma_tilde)}\n"
            )
    if not uploads:
        raise RunError("all clients were excluded by the sample-size gate")

    state = server_merge(uploads)
    state = replace(state, active=active)
    if trace is not None:
        trace.write(
            f"event=merge clients={len(uploads)} total_n={state.total_n} "
            f"m={_checksum(state.merged_m)} sigma={_checksum(state.merged_sigma)}\n"
        )
    est = estimate_subspace(state, d=config.d, ridge=config.ridge)
    if active is not None:
        est = embed(est, p)
    if trace is not None:
        trace.write(f"event=estimate d={est.d} beta={_checksum(est.beta)}\n")
    return FsirResult(
        estimate=est,
        active=active,
        excluded=tuple(excluded),
        d_hat=est.d,
        vgm_specs=tuple(specs),
    )
