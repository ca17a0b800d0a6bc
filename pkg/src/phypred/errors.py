"""Exception types shared across the package."""


class PhyPredError(Exception):
    """Base class for all package errors."""


class ShapeError(PhyPredError, ValueError):
    """Operand shapes are incompatible with the requested operation."""


class GraphError(PhyPredError, RuntimeError):
    """Invalid use of the autodiff graph (e.g. non-scalar loss)."""


class NonFiniteError(PhyPredError, FloatingPointError):
    """A computation produced or received NaN/Inf where finite values are required."""


class IntegrationError(NonFiniteError):
    """A Runge-Kutta stage diverged; carries the stage that failed."""

    def __init__(self, stage: str):
        super().__init__(f"non-finite values in integrator {stage}")
        self.stage = stage


class ConfigError(PhyPredError, ValueError):
    """Invalid configuration value or unknown configuration key."""


class SolverError(PhyPredError, RuntimeError):
    """A numerical data-generation solver failed (e.g. blow-up)."""


class TensorFileError(PhyPredError, ValueError):
    """Malformed tensor file; carries the byte offset of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class CheckpointError(PhyPredError, ValueError):
    """Checkpoint does not match the model it is being loaded into."""
