"""Exception hierarchy.

Configuration errors derive from :class:`ConfigError` and numerical failures
from :class:`NumericalError`; the CLI maps them to exit codes 2 and 3.
"""


class SawtError(Exception):
    """Base class for every error raised by the library."""


class ConfigError(SawtError, ValueError):
    """Invalid parameters or inputs."""


class NumericalError(SawtError, ArithmeticError):
    """A computation could not be carried out to the requested accuracy."""


class NotUnimodular(ConfigError):
    pass


class DegenerateB(ConfigError):
    pass


class ComplexEntriesUnsupported(ConfigError):
    pass


class NonpositiveScale(ConfigError):
    pass


class NotNormalized(ConfigError):
    pass


class IndexOutOfRange(ConfigError):
    pass


class GridMismatch(ConfigError):
    pass


class ParseError(ConfigError):
    pass


class NonuniformGrid(ParseError):
    pass


class NyquistViolation(NumericalError):
    pass


class DivergentMoment(NumericalError):
    pass


class NotConverged(NumericalError):
    pass


class IllConditionedFrame(NumericalError):
    pass


class SlowDecay(NumericalError):
    pass


class SingularDenominator(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass
