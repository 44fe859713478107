"""Exception types raised by momentppt."""


class MomentPPTError(Exception):
    """Base class for all errors raised by this package."""


class DegenerateState(MomentPPTError, ValueError):
    """The requested state has zero norm and cannot be normalized."""


class TruncationTooSevere(MomentPPTError):
    """A Fock-space cutoff discards more of the state than allowed."""

    def __init__(self, message, discarded_weight=None):
        super().__init__(message)
        self.discarded_weight = discarded_weight


class IrrationalValue(MomentPPTError, ArithmeticError):
    """An exact moment contains a surviving square-root factor.

    ``entry`` is set to the 1-based ``(p, q)`` matrix position when the error
    is raised while assembling a moment matrix.
    """

    def __init__(self, message, radicands=(), entry=None):
        super().__init__(message)
        self.radicands = tuple(radicands)
        self.entry = entry


class SubsetOutOfRange(MomentPPTError, IndexError):
    """An index subset refers to rows outside the matrix."""


class BudgetExhausted(MomentPPTError):
    """A search stopped before covering its whole space."""

    def __init__(self, message, examined):
        super().__init__(message)
        self.examined = examined


class NoMatchingOrdering(MomentPPTError):
    """No operator ordering reproduces the requested minor signature."""

    def __init__(self, message, examined=0):
        super().__init__(message)
        self.examined = examined


class SoundnessViolation(MomentPPTError, AssertionError):
    """A moment-based NPT witness contradicts the partial-transpose oracle."""
