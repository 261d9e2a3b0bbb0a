"""Exception taxonomy shared across the package."""


class CtrlBenchError(Exception):
    """Base class for all package errors."""


class DimensionError(CtrlBenchError):
    """Operands have incompatible shapes."""


class SingularMatrixError(CtrlBenchError):
    """Elimination hit a pivot below the singularity tolerance."""


class NonHurwitzError(CtrlBenchError):
    """Operation requires a strictly stable (Hurwitz) matrix."""


class DesignFailureError(CtrlBenchError):
    """Controller synthesis failed (no stabilizing solution found)."""


class DivergenceError(CtrlBenchError):
    """Simulated state became non-finite or exceeded its bound.

    ``time`` carries the simulation time at which the failure occurred,
    when known.
    """

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class TrainingDivergenceError(CtrlBenchError):
    """A learning update produced a non-finite loss or gradient.

    ``episode`` carries the training episode index, when known.
    """

    def __init__(self, message, episode=None):
        super().__init__(message)
        self.episode = episode


class UsageError(CtrlBenchError):
    """API called out of sequence or with inconsistent bookkeeping."""


class UnderfullBufferError(CtrlBenchError):
    """Sample requested from a buffer with fewer items than the batch."""


class CatalogError(CtrlBenchError):
    """Unknown scenario, plant, or agent name."""


class ProbeInvalidError(CtrlBenchError):
    """Margin probe preconditions not met (loop already unstable)."""


class ConfigError(CtrlBenchError):
    """Invalid run configuration."""
