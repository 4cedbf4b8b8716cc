"""Exception hierarchy shared by all forrkit modules."""


class ForrkitError(Exception):
    """Base class for every error raised by forrkit."""


class ParseError(ForrkitError, ValueError):
    pass


class MissingHeader(ParseError):
    pass


class BadCharacter(ParseError):
    pass


class LengthMismatch(ParseError):
    pass


class SizeMismatch(ForrkitError, ValueError):
    """Two operands are defined on a different number of variables."""


class NotBent(ForrkitError, ValueError):
    pass


class UnsupportedN(ForrkitError, ValueError):
    pass


class TooLarge(ForrkitError, ValueError):
    """The requested brute-force evaluation exceeds the work cap."""


class TooManyQubits(ForrkitError, ValueError):
    pass


class IndexOutOfRange(ForrkitError, IndexError):
    pass


class BadWeight(ForrkitError, ValueError):
    pass


class SimulationInconsistency(ForrkitError, RuntimeError):
    """A sampled witness contradicts the classical spectrum oracle."""
