"""Exception types raised by cihomol."""


class CIHomolError(Exception):
    """Base class for all library errors."""


class UsageError(CIHomolError, ValueError):
    """Arguments have the wrong shape or violate a documented precondition."""


class RingMismatchError(UsageError):
    """Two objects that must live over the same ring do not."""


class InvalidEmbeddingError(UsageError):
    pass


class UnsupportedRingError(UsageError):
    pass


class ParseError(CIHomolError, ValueError):
    """Malformed ring spec, module file, or cache entry."""

    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at {position})"
        super().__init__(message)
