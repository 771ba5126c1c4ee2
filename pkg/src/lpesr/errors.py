"""Exception types shared across the package."""


class LpesrError(Exception):
    """Base class for all package-specific errors."""


class DimensionError(LpesrError, ValueError):
    """Raster or plane dimensions are invalid or inconsistent."""


class ParameterError(LpesrError, ValueError):
    """A parameter is outside its documented domain."""


class CorpusError(LpesrError):
    """One or more training corpus files could not be read."""

    def __init__(self, failures):
        self.failures = list(failures)
        lines = ", ".join(f"{p} ({msg})" for p, msg in self.failures)
        super().__init__(f"unreadable corpus files: {lines}")


class ModelFormatError(LpesrError):
    """Model file violates the container format."""


class ModelMagicError(ModelFormatError):
    """Magic bytes or version byte do not match."""


class ModelTruncationError(ModelFormatError):
    """File ends before the declared payload is complete."""


class ModelDimensionError(ModelFormatError):
    """Stored matrix dimensions are inconsistent with the header."""
