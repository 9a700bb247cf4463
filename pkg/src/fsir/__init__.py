"""Federated sliced inverse regression with differential privacy.

A library plus simulation harness: private slice-mean and covariance
release on simulated clients, one-shot server aggregation into an
estimated sufficient dimension reduction subspace, collaborative variable
screening for high-dimensional clients, and a tracing-attack evaluator.
"""

from .data import (
    CovarianceEstimate,
    LabeledDataset,
    SliceMeanMatrix,
    covariance_estimate,
    read_csv,
    slice_mean_matrix,
    slice_response,
    truncate,
    write_csv,
)
from .dp import (
    ClientUpload,
    PrivacyBudget,
    VgmNoiseSpec,
    budget_check,
    iid_gaussian_mechanism,
    l2_sensitivity,
    min_sample_size,
    private_covariance,
    vgm_mechanism,
    vgm_noise_floor,
)
from .errors import (
    ClientExcludedError,
    ConfigError,
    DegenerateDataError,
    FsirError,
    InvalidInputError,
    ProtocolError,
    RunError,
    ScreeningDegenerateError,
    SingularMatrixError,
)
from .experiments import (
    ExperimentConfig,
    RunRecord,
    reproduce_tables,
    run_attack_demo,
    run_experiment,
)
from .federation import (
    FsirResult,
    ProtocolConfig,
    ServerState,
    SubspaceEstimate,
    client_pipeline,
    embed,
    estimate_subspace,
    run_fsir,
    server_merge,
)
from .metrics import (
    RocCurve,
    projection_loss,
    roc_curve,
    subspace_angle,
    tracing_attack_score,
    tracing_experiment,
)
from .models import ModelSpec, generate, make_beta, make_dataset, make_model
from .numerics import client_stream, make_rng
from .screening import ActiveSet, ClientVote, ccmd_aggregate, ccmd_client, restrict_dataset

__version__ = "0.1.0"
