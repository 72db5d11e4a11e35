"""Exception types raised by the library.

Every error derives from :class:`TraceMomentsError`; the class name is what
the command-line front end reports, so names are part of the interface.
"""


class TraceMomentsError(Exception):
    """Base class for all library errors."""


class InvalidParameter(TraceMomentsError, ValueError):
    """A parameter set fails validation."""


class NonPositiveN(InvalidParameter):
    pass


class NonPositiveBeta(InvalidParameter):
    pass


class InvalidExponent(InvalidParameter):
    """The density exponent is out of the range where Gamma factors exist."""


class UnsupportedBeta(InvalidParameter):
    pass


class NonPositiveT2(InvalidParameter):
    pass


class InsufficientTraces(TraceMomentsError, ValueError):
    pass


class DegenerateScale(TraceMomentsError, ValueError):
    pass


class SingularSystem(TraceMomentsError, ValueError):
    pass


class EmptySample(TraceMomentsError, ValueError):
    pass


class NoConvergence(TraceMomentsError, RuntimeError):
    pass
