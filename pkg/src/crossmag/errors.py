"""Exception types shared across the package."""


class CrossmagError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(CrossmagError, ValueError):
    """An argument violates a documented precondition."""


class NotFoundError(CrossmagError, KeyError):
    """A named resource (material, file) does not exist."""

    def __str__(self):
        # KeyError quotes its arg; keep the plain message readable.
        return Exception.__str__(self)


class ConfigError(CrossmagError, ValueError):
    """Run configuration is syntactically or semantically invalid."""


class NumericError(CrossmagError, ArithmeticError):
    """Non-finite values appeared during field or torque evaluation."""


class StiffnessError(CrossmagError, RuntimeError):
    """Adaptive step size underflowed; the problem is too stiff."""

    def __init__(self, msg, t=None):
        super().__init__(msg)
        self.t = t


class NonConvergenceError(CrossmagError, RuntimeError):
    """Relaxation failed to reach equilibrium in the allowed time.

    Carries the final state so callers can inspect or resume.
    """

    def __init__(self, msg, state=None, trajectory=None):
        super().__init__(msg)
        self.state = state
        self.trajectory = trajectory


class PreparationError(CrossmagError, RuntimeError):
    """State preparation relaxed into a different state than requested."""

    def __init__(self, msg, achieved=None):
        super().__init__(msg)
        self.achieved = achieved


class IndeterminateError(CrossmagError, RuntimeError):
    """The trajectory ends too early to confirm or reject a switching event."""
