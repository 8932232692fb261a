"""Exception hierarchy.

Every parser error derives from :class:`FormatError` (itself a
``ValueError``) so callers can catch one class for "bad input file".
"""


class LulcError(Exception):
    """Base class for all package errors."""


class FormatError(LulcError, ValueError):
    """Input bytes or text do not conform to a supported format."""


class BadMagic(FormatError):
    pass


class UnsupportedFeature(FormatError):
    pass


class Truncated(FormatError):
    pass


class BadFileCode(FormatError):
    pass


class UnsupportedShapeType(FormatError):
    pass


class ParseError(FormatError):
    """Malformed JSON. ``offset`` is the byte offset of the failure."""

    def __init__(self, message, offset=None):
        super().__init__(message if offset is None else f"{message} (byte {offset})")
        self.offset = offset


class UnsupportedGeometry(FormatError):
    pass


class XmlError(FormatError):
    pass


class SchemaError(FormatError):
    pass


class CsvError(FormatError):
    pass


class DimensionMismatch(LulcError, ValueError):
    pass


class MissingFixedValue(LulcError, ValueError):
    pass


class BadFactor(LulcError, ValueError):
    pass


class NoBands(LulcError, ValueError):
    pass


class BadBbox(LulcError, ValueError):
    pass


class BadSize(LulcError, ValueError):
    pass


class NetworkError(LulcError, OSError):
    pass


class Timeout(NetworkError):
    pass


class HttpStatus(NetworkError):
    def __init__(self, code, url=""):
        super().__init__(f"HTTP {code} for {url}" if url else f"HTTP {code}")
        self.code = code
        self.url = url
