"""Exception types raised across the package."""


class MsdgmError(ValueError):
    """Base class for all input and estimation failures."""


class PatternError(MsdgmError):
    """Malformed or inconsistent point pattern input."""


class PreprocessingError(MsdgmError):
    """A spectral step was asked to run on data that skipped preprocessing."""


class EstimationError(MsdgmError):
    """No usable frequencies remain after inversion and flagging."""
