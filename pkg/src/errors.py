class SimplexityError(Exception):
    """Base class for every error raised by the simplexity modules."""


class DimensionError(SimplexityError, ValueError):
    """Dimension, length or axis outside the supported range."""


class LongRunningRequired(DimensionError):
    """An n = 6 run was requested without opting in to long-running work."""


class ProfileError(SimplexityError, ValueError):
    """A column profile that cannot come from a non-degenerate simplex."""


class DegenerateSimplexError(SimplexityError, ValueError):
    def __init__(self, index: int, message: str):
        """
        :param index: Position of the offending simplex in its dissection
        :param message: Human-readable reason
        """
        super().__init__(f"Simplex #{index}: {message}")
        self.index = index


class DissectionFormatError(SimplexityError, ValueError):
    """An input file could not be read or does not match its schema."""


class LPError(SimplexityError, RuntimeError):
    """The exact solver failed, or its answer did not survive re-checking."""
