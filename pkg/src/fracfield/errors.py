"""Exception types shared across the package."""


class FracfieldError(Exception):
    """Base class for package errors."""


class ParameterWindowError(FracfieldError, ValueError):
    """A parameter lies outside the admissible window of an operation.

    The message names the violated inequality; the CLI maps this to exit
    code 2.
    """


class TruncationError(FracfieldError, RuntimeError):
    """A scale truncation is too small for the requested computation."""


class QuadratureError(FracfieldError, RuntimeError):
    """Numeric quadrature failed to reach its target accuracy."""

    def __init__(self, message, achieved_error):
        super().__init__(f"{message} (achieved error estimate {achieved_error:.3e})")
        self.achieved_error = achieved_error


class InfiniteMomentError(FracfieldError, ValueError):
    """Requested moment order is not finite for the given stability index."""
