"""Exception types shared across the package."""


class DeltaJetError(Exception):
    """Base class for every error raised by deltajet."""


class PrecisionExhausted(DeltaJetError):
    """An operation needed more p-adic digits than the working precision holds."""


class IntegralityFailure(DeltaJetError):
    """A quantity that should be integral carries a genuine denominator.

    ``witness`` names the offending monomial or element when one is known.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class DivisibilityFailure(IntegralityFailure):
    """An exact division by p or pi left a nonzero remainder."""


class HypothesisViolation(DeltaJetError):
    """A theorem hypothesis (e.g. v_p(pi) >= 1/(p-1)) does not hold."""


class OrderOverflow(DeltaJetError):
    """A jet variable of order higher than the ambient ring allows was needed."""


class TruncationError(DeltaJetError):
    """Series with incompatible truncations, or support outside the bounds."""


class RelationViolation(DeltaJetError):
    """A Hecke coefficient array violates one of its defining recursions."""

    def __init__(self, message, n=None):
        super().__init__(message)
        self.n = n


class MalformedFile(DeltaJetError):
    """A coefficient or series file could not be parsed."""


class ConfigError(DeltaJetError):
    """An invalid ring or suite configuration."""
