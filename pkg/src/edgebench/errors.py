"""Exception hierarchy."""


class EdgeBenchError(Exception):
    """Base class for every error raised by edgebench."""


class ParameterError(EdgeBenchError, ValueError):
    """An argument is out of its valid domain."""


class FormatError(EdgeBenchError, ValueError):
    """Unsupported image file format or bit depth."""


class StructureError(EdgeBenchError, ValueError):
    """A composite structure (pyramid, bundle) is malformed."""


class NumericalError(EdgeBenchError, ArithmeticError):
    """An iterative solver did not reach its tolerance."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class CalibrationError(EdgeBenchError):
    """A detail knob could not be solved for the target PSNR."""

    def __init__(self, message: str, history=None):
        super().__init__(message)
        self.history = history or []


class ConfigurationError(EdgeBenchError):
    """The benchmark configuration is inconsistent."""
