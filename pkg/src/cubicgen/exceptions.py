"""Exception hierarchy for cubicgen."""


class CubicgenError(Exception):
    """Base class for all cubicgen errors."""


class ConfigurationError(CubicgenError):
    """Invalid input: dimension/mode mismatch, bad occupation number, unknown id."""


class NumericError(CubicgenError):
    """Non-finite values encountered during a numeric computation."""


class DegenerateProjectionError(CubicgenError):
    """The heralding projection has (numerically) zero probability."""


class CutoffError(CubicgenError):
    """Truncation tail mass too large for the requested computation (strict mode)."""
