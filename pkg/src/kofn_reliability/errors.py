"""Exception hierarchy shared by the analysis, inversion and simulation layers."""


class ReliabilityError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(ReliabilityError, ValueError):
    """Invalid model parameters or call arguments."""


class NumericalError(ReliabilityError, ArithmeticError):
    """A computation could not produce a trustworthy finite result."""


class ConditioningError(NumericalError):
    """A linear system is singular or too ill-conditioned to solve."""


class RangeError(NumericalError, OverflowError):
    """A closed form exceeds the binary64 range or the supported n."""


class InversionError(NumericalError):
    """Numerical transform inversion failed its oscillation diagnostic."""


class ConsistencyError(ReliabilityError, AssertionError):
    """Two independent computations of the same quantity disagree."""
