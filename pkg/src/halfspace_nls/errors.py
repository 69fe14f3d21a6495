"""Exception types shared across the package."""


class ParameterError(ValueError):
    """Invalid problem parameters (p <= 1, c <= 0, ...)."""


class ThresholdError(ParameterError):
    """Boundary value lies above the existence threshold c_p.

    Raised by the 1D profile machinery; callers use it as the
    nonexistence signal.
    """

    def __init__(self, c, p, c_p):
        self.c, self.p, self.c_p = c, p, c_p
        super().__init__(
            f"c = {c:.12g} exceeds the threshold c_p = {c_p:.12g} for p = {p:g}: "
            "no decaying 1D profile with this boundary value"
        )


class GridMismatchError(ValueError):
    """Fields living on different grids were combined."""


class SupportOverflowError(ValueError):
    """A compactly supported test function does not fit in the grid."""


class ConvergenceError(RuntimeError):
    """An iterative method failed to reach its tolerance."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class GeometryError(RuntimeError):
    """Mountain-pass geometry is violated (bad endpoint, max at an endpoint)."""
