class ConfigError(ValueError):
    """Invalid mesh, scheme or solver parameters."""


class SingularSystemError(ArithmeticError):
    """A zero or denormal pivot was met in a tridiagonal solve."""


class ConvergenceError(RuntimeError):
    """Newton iteration did not reach the requested tolerance."""

    def __init__(self, message, solution=None):
        super().__init__(message)
        self.solution = solution


class StabilityError(RuntimeError):
    """The Jacobian lost its M-matrix structure (typically gamma < f_y)."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
