"""Exception hierarchy for mskit operations."""

from typing import Optional


class MskitError(Exception):
    """Base exception for all mskit computation errors."""

    def __init__(self, message: str):
        self.message = message
        super().__init__(self.message)


class TrajectoryParseError(MskitError):
    """Raised when a landmark file cannot be parsed."""

    def __init__(self, message: str, row: Optional[int] = None, column: Optional[str] = None):
        location = []
        if row is not None:
            location.append(f"row {row}")
        if column is not None:
            location.append(f"column '{column}'")
        if location:
            message = f"{message} ({', '.join(location)})"
        self.row = row
        self.column = column
        super().__init__(message)


class DegenerateCropError(MskitError):
    """Raised when the crop box cannot be scaled."""

    pass


class RegionError(MskitError):
    """Raised for unknown or invalid landmark regions."""

    pass


class KinematicsError(MskitError):
    """Raised when velocities or accelerations cannot be computed."""

    pass


class MsiError(MskitError):
    """Raised when an MSI score cannot be computed."""

    pass


class CorrelationError(MskitError):
    """Raised by the correlation harness."""

    pass


class SmoothingError(MskitError):
    """Raised for invalid smoothing weights or shape mismatches."""

    pass


class ModelFormatError(MskitError):
    """Raised when a trained-smoother file is malformed or does not match."""

    pass


class TrainingDivergedError(MskitError):
    """Raised when the training loss becomes non-finite."""

    def __init__(self, message: str, epoch: int, losses: list[float]):
        self.epoch = epoch
        self.losses = losses
        tail = ", ".join(f"{loss:.6g}" for loss in losses[-5:])
        super().__init__(f"{message} at epoch {epoch} (last losses: {tail})")


class MaskError(MskitError):
    """Raised by mask morphology and augmentation."""

    pass


class SliceError(MskitError):
    """Raised by slice visualization."""

    pass


class ConfigError(MskitError):
    """Raised when a user-supplied config file is invalid."""

    pass
