class CodecError(ValueError):
    """Base class for coding/decoding failures."""


class UnknownSymbolError(CodecError, KeyError):
    """A sample has no codeword in the fitted codebook."""


class DesyncError(CodecError):
    """No codeword matches the head of a bit stream."""


class CorruptStreamError(CodecError):
    """Decoded values fall outside the valid sample range."""
