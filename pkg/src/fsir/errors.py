"""Exception hierarchy shared by all fsir modules."""


class FsirError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(FsirError, ValueError):
    """An argument violates a documented precondition."""


class DegenerateDataError(FsirError):
    """Data carries no usable signal (e.g. an all-zero design matrix)."""


class SingularMatrixError(FsirError):
    """A linear system stayed singular after ridge escalation."""

    def __init__(self, message: str, ridge: float):
        super().__init__(message)
        self.ridge = ridge


class ClientExcludedError(FsirError):
    """A client fails the minimal-sample-size gate and is dropped from the round."""


class ScreeningDegenerateError(FsirError):
    """Collaborative screening returned an empty active set."""


class ProtocolError(FsirError):
    """Uploads are mutually inconsistent (dimension mismatch etc.)."""


class RunError(FsirError):
    """An experiment run could not be completed."""


class ConfigError(FsirError):
    """Invalid experiment configuration."""
