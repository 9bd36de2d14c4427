"""Exception types raised across the package."""


class BanditForgeError(Exception):
    pass


class DimensionMismatch(BanditForgeError, ValueError):
    pass


class OneClassData(BanditForgeError, ValueError):
    """The data holds observations of a single reward class only."""


class EmptyPool(BanditForgeError, ValueError):
    pass


class SchemeMismatch(BanditForgeError, ValueError):
    pass


class ArmOutOfRange(BanditForgeError, IndexError):
    pass


class LengthMismatch(BanditForgeError, ValueError):
    pass


class CovarianceNotPSD(BanditForgeError, ValueError):
    pass


class SubsetTooLarge(BanditForgeError, ValueError):
    pass


class DatasetFormatError(BanditForgeError, ValueError):
    """Base class for problems found while parsing a dataset file."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class HeaderMalformed(DatasetFormatError):
    pass


class IndexOutOfRange(DatasetFormatError):
    pass


class RowCountMismatch(DatasetFormatError):
    pass


class ValueUnparsable(DatasetFormatError):
    pass
