"""Exception hierarchy shared across the package."""


class GIVPError(Exception):
    """Base class for every error raised by this package."""


class ContractViolation(GIVPError, ValueError):
    """An argument broke an operation's precondition (bad shape, NaN, ...)."""


class ConfigurationError(GIVPError, ValueError):
    """Components of a problem or run configuration do not fit together."""


class RangeError(GIVPError, OverflowError):
    """A numerical quantity left the representable range."""


class DivergenceError(GIVPError, RuntimeError):
    """Integration produced a non-finite or runaway state.

    ``state`` and ``time`` describe the last good point; ``trajectory`` holds
    the samples recorded up to it (when available).
    """

    def __init__(self, message, state=None, time=None, trajectory=None):
        super().__init__(message)
        self.state = state
        self.time = time
        self.trajectory = trajectory


class StepUnderflowError(GIVPError, RuntimeError):
    """The adaptive step size collapsed below the allowed floor."""

    def __init__(self, message, state=None, time=None):
        super().__init__(message)
        self.state = state
        self.time = time


class IndeterminateError(GIVPError, RuntimeError):
    """A check could not reach a verdict (e.g. the field vanished on every sample)."""
