"""Exception hierarchy shared across the package."""


class EsiError(Exception):
    """Base class for every error raised by this package."""


class EventError(EsiError, ValueError):
    pass


class OutOfBounds(EventError):
    pass


class BadPolarity(EventError):
    pass


class NegativeInterval(EsiError, ValueError):
    """A timestamp precedes the last update time of its pixel.

    ``index`` is the position of the offending event in the batch being
    processed, when known.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class FormatError(EsiError, ValueError):
    pass


class ParseError(FormatError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NonMonotoneTime(FormatError):
    pass


class BadMagic(FormatError):
    pass


class TruncatedFile(FormatError):
    pass


class CountMismatch(FormatError):
    pass


class GeometryMismatch(EsiError, ValueError):
    pass


class SamplingTooCoarse(EsiError, ValueError):
    pass


class NonPositiveIntensity(EsiError, ValueError):
    pass
