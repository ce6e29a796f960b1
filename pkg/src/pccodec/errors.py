"""Exception types shared across the package."""


class PccodecError(Exception):
    """Base class for all package-specific errors."""


class InvalidEnvelope(PccodecError):
    """Envelope parameters violate the family domain or the mass/range constraints."""


class DomainError(PccodecError):
    """Argument outside the mathematical domain of an operation."""


class LemmaViolation(PccodecError):
    """A verified inequality failed beyond its numerical margin (implementation bug)."""


class BoundViolation(PccodecError):
    """A Monte-Carlo-checked bound failed beyond its statistical margin."""


class UnboundedSum(PccodecError):
    """A tail sum could not be evaluated within the requested truncation budget."""


class PrecisionOverflow(PccodecError):
    """Symbol-interval total exceeds the 32-bit cap of the arithmetic coder."""


class CorruptStream(PccodecError):
    """Decoder rejected the stream: bad header, bad prefix code, or desynchronization."""


class InvalidSymbol(PccodecError):
    """Message symbols must be integers in [1, 2**62]."""


class LengthLimitExceeded(PccodecError):
    """Message longer than the supported 2**31 symbols."""


class RankOutOfRange(PccodecError):
    """Rank outside the current mixture alphabet {0..K}."""
