"""Exception hierarchy."""


class TopocodeError(Exception):
    """Base class for all package errors."""


class DimensionTooSmallError(TopocodeError, ValueError):
    pass


class InvalidFiltrationError(TopocodeError, ValueError):
    pass


class NegativeIntensityError(TopocodeError, ValueError):
    pass


class OutOfRangeError(TopocodeError, ValueError):
    pass


class ConstructionFailure(TopocodeError, RuntimeError):
    pass


class ConfigError(TopocodeError, ValueError):
    pass


class DatasetNotFoundError(TopocodeError, FileNotFoundError):
    pass


class FormatError(TopocodeError, ValueError):
    """Malformed or unsupported dataset file."""


class CodecError(TopocodeError, ValueError):
    """Packet parse failure at a known field and byte offset."""

    kind = "codec"

    def __init__(self, field, offset, message=""):
        self.field = field
        self.offset = offset
        text = f"{self.kind}: field {field!r} at offset {offset}"
        if message:
            text += f": {message}"
        super().__init__(text)


class BadMagicError(CodecError):
    kind = "bad-magic"


class TruncatedError(CodecError):
    kind = "truncated"


class NonMonotoneGroupsError(CodecError):
    kind = "non-monotone-group-ids"


class TrailingBytesError(CodecError):
    kind = "trailing-bytes"


class UnsupportedFieldError(CodecError):
    kind = "unsupported"


class DimensionOverflowError(TopocodeError, ValueError):
    pass
