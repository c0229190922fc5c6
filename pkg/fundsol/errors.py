"""
Exception hierarchy for fundsol.

Every error raised on purpose by the library derives from FundsolError,
so the CLI can map the whole family to exit code 2 with a single except.
"""


class FundsolError(Exception):
    """Base class for all fundsol errors."""


# --- symbols ---

class ParseError(FundsolError):
    pass


class NotHomogeneous(FundsolError):
    pass


class NotElliptic(FundsolError):
    pass


class OddDegree(FundsolError):
    pass


class NotUnit(FundsolError):
    pass


class UnsupportedSymbolForm(FundsolError):
    pass


# --- schwartz / quadrature ---

class DepthExceeded(FundsolError):
    """Derivative order above the recurrence guard (64)."""


class UnsupportedDimension(FundsolError):
    pass


class BadTolerance(FundsolError):
    pass


# --- pairing / continuation ---

class NonIntegerDegree(FundsolError):
    """The k >= n formula needs an integer degree."""


class WrongBranch(FundsolError):
    pass


class OnPole(FundsolError):
    """z sits on a zero of the integration-by-parts denominator."""


class StripViolation(FundsolError):
    """The continued integral does not converge at this z and depth."""


class InvalidConfig(FundsolError):
    pass
