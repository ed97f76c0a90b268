"""Exception hierarchy for blockrep.

Everything raised deliberately by the library derives from BlockrepError so
callers (and the CLI) can distinguish contract violations from genuine bugs.
"""


class BlockrepError(Exception):
    """Base class for all blockrep domain errors."""


class InvalidEncoding(BlockrepError):
    """Raw input bytes are not valid UTF-8."""


class EmptyAfterNormalization(BlockrepError):
    """Normalization left no symbols to analyze."""


class CapExceedsLength(BlockrepError):
    """Requested block-length cap is outside [1, n]."""


class UnsupportedOrder(BlockrepError):
    """Entropy order outside the supported set."""


class MismatchedSeries(BlockrepError):
    """Two per-length series do not come from the same text / length range."""


class OutOfRange(BlockrepError):
    """Scalar argument outside its mathematical domain."""


class InsufficientRange(BlockrepError):
    """Not enough usable block lengths to fit a growth model."""


class NonConvergence(BlockrepError):
    """Model refinement failed to produce a finite result."""


class RangeMismatch(BlockrepError):
    """Model fits being compared were not produced on the same range."""


class TextTooShort(BlockrepError):
    """Text is shorter than the minimum required by the operation."""


class PoolTooSmall(BlockrepError):
    """Candidate pool has fewer texts than requested."""


class EmptyInput(BlockrepError):
    """An aggregate operation received no results."""


class TransportError(BlockrepError):
    """Remote generation endpoint unreachable after exhausting retries."""


class TruncatedGeneration(BlockrepError):
    """Remote generation returned an empty part."""
