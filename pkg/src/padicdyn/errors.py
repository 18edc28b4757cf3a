"""Exception types raised across the toolkit."""


class PadicError(Exception):
    """Base class for every error raised by padicdyn."""


class ShapeMismatch(PadicError, ValueError):
    """Operands disagree on (p, k, n)."""


class LevelError(PadicError, ValueError):
    """A requested level is outside the valid range."""


class ConfigError(PadicError, ValueError):
    """Parameters violate the configured limits (prime p, table size)."""


class IllFormed(PadicError):
    """A reduced map is not well defined because the table is not compatible."""


class NotBijective(PadicError):
    """A reduced map is not a permutation."""


class NotTransitive(PadicError):
    """A reduced map is not a single cycle."""


class PartitionError(PadicError):
    """Start-class visits along some cycle are not spaced by the block length."""


class TargetNotSingleCycle(PadicError):
    pass


class TargetNotCompatible(PadicError):
    pass


class NoSolution(PadicError):
    pass


class VerificationFailure(PadicError):
    """A constructed object failed a check; carries the level and witness."""

    def __init__(self, message, level=None, witness=None):
        super().__init__(message)
        self.level = level
        self.witness = witness


class RetriesExhausted(PadicError):
    pass


class MapFormatError(PadicError, ValueError):
    """A map table file is malformed or violates table invariants."""
