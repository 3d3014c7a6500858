"""Exception hierarchy shared by all modules."""


class TDHOError(Exception):
    """Base class for library errors."""


class DomainError(TDHOError, ValueError):
    """A time or argument lies outside the admissible domain."""


class ContractError(TDHOError, ValueError):
    """Inputs violate a documented precondition."""


class NumericError(TDHOError, ArithmeticError):
    """A numerical routine failed to reach its tolerance."""


class SingularityError(NumericError):
    """Integration stalled near a singular endpoint.

    Attributes
    ----------
    last_time : float
        Last time the integrator reached before giving up.
    """

    def __init__(self, message, last_time=None):
        super().__init__(message)
        self.last_time = last_time


class CausticError(TDHOError, ValueError):
    """The regular kernel was requested where s(t, t0) vanishes."""


class UnsupportedError(TDHOError, NotImplementedError):
    """The requested model has no closed form or canonical choice."""


class NotFoundError(TDHOError, LookupError):
    """A root search found no sign change in the given bracket."""


class DivergenceError(TDHOError, ValueError):
    """A quantity was requested whose defining series diverges."""


class DegenerateZeroWarning(UserWarning):
    """A sampled solution touches zero without changing sign."""
