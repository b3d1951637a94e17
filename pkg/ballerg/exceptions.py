"""
Exception hierarchy for ballerg.

Every error derives from BallergError and from the closest builtin, so callers
that only know about ValueError or RuntimeError still catch them.
"""


class BallergError(Exception):
    """Root of all errors raised by the package."""


class SpaceError(BallergError, ValueError):
    """Wrong ambient space, malformed vector, or a point outside the open ball."""


class SingularityError(BallergError, ArithmeticError):
    """The Möbius denominator 1 - <x, a> vanished."""


class DimensionCapError(BallergError, ValueError):
    """A forward shift would grow a vector past the configured dimension cap."""


class SymbolError(BallergError, ValueError):
    """Invalid symbol parameters or a violated symbol hypothesis."""


class CompositionUnavailableError(SymbolError):
    """Exact polynomial composition is not defined for this symbol."""


class ConvergenceError(BallergError, RuntimeError):
    """Picard iteration did not settle within the iteration budget."""


class RateFitError(BallergError, ValueError):
    """Not enough positive distances to fit a rate."""


class DictionaryError(BallergError, ValueError):
    """Empty, duplicated, or unnormalized test-function dictionary."""


class ConfigError(BallergError, ValueError):
    """Invalid experiment configuration."""
