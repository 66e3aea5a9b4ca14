"""Exception hierarchy shared by every module."""


class HatBraidError(Exception):
    """Base class for all library errors."""


class ZeroBase(HatBraidError, ZeroDivisionError):
    pass


class InvalidDimension(HatBraidError, ValueError):
    pass


class DimensionMismatch(HatBraidError, ValueError):
    pass


class Degenerate(HatBraidError, ArithmeticError):
    """Raised when the two roots lambda_+ and lambda_- coincide (T**2 == 4)."""


class NoRealEta(HatBraidError, ValueError):
    """T(q0) is not a real number >= 2, so eta is not real."""


class PoleAtTheta(HatBraidError, ZeroDivisionError):
    pass


class NonConvergence(HatBraidError, RuntimeError):
    pass


class CapExceeded(HatBraidError, ValueError):
    pass


class WordsNotSkeinTriple(HatBraidError, ValueError):
    pass


class RelationViolated(HatBraidError, ValueError):
    pass


class UnsupportedSpec(HatBraidError, ValueError):
    pass


class NegativeParameter(HatBraidError, ValueError):
    pass
