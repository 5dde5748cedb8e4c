"""Exception types shared across the package."""


class PicycError(Exception):
    """Base class for all picyc errors."""


class ReadParseError(PicycError):
    """A read file is malformed; message carries file and line context."""


class InputError(PicycError):
    """Bad user input: manifest problems, unreadable files, bad parameters."""


class FileFormatError(PicycError):
    """A serialized artifact is structurally invalid."""


class BadMagicError(FileFormatError):
    """File does not start with the expected magic bytes."""


class VersionMismatchError(FileFormatError):
    """File carries an unsupported format version."""


class TruncatedFileError(FileFormatError):
    """File ended before the declared content was read."""


class DigestMismatchError(FileFormatError):
    """Recomputed content digest disagrees with the stored one."""


class PairMismatchError(PicycError):
    """Two artifacts (graph/index, graph/cycles) do not belong together."""


class OrientationError(PicycError):
    """A cycle path cannot be linearized into a nucleotide string."""
