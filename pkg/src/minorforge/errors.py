"""Exception hierarchy shared across the package."""


class MinorforgeError(Exception):
    """Base class for all package-specific errors."""


class RingMismatchError(MinorforgeError):
    """Operands live in different rings."""


class ParseError(MinorforgeError, ValueError):
    """Malformed polynomial / descriptor text."""


class UnitIdealError(MinorforgeError, ValueError):
    """Operation requires a proper ideal but got the unit ideal."""


class ResourceCapError(MinorforgeError):
    """A configured resource cap was hit; the result is deliberately absent."""

    exit_code = 3


class PairLimitExceeded(ResourceCapError):
    """The S-pair budget of a Groebner computation ran out."""


class TimeLimitExceeded(ResourceCapError):
    """The wall-clock budget of a Groebner computation ran out."""


class GenericityError(MinorforgeError):
    """A randomized genericity assumption failed after the allowed retries."""
