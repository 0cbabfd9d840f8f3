"""Exception types raised across the package."""


class AntishiftError(Exception):
    """Base class for all package errors."""


class ConfigError(AntishiftError, ValueError):
    pass


class DegenerateConditioningError(AntishiftError, ValueError):
    """Conditioning on an event of probability zero."""


class UnknownNodeError(AntishiftError, KeyError):
    pass


class CyclicGraphError(AntishiftError, ValueError):
    pass


class EnumerationLimitError(AntishiftError, ValueError):
    pass


class TrainingDivergedError(AntishiftError, FloatingPointError):
    pass


class BatchCompositionError(AntishiftError, ValueError):
    pass


class EmptyCellError(AntishiftError, ValueError):
    pass


class SingleClassError(AntishiftError, ValueError):
    pass


class InsufficientRowsError(AntishiftError, ValueError):
    pass


class VocabularyMismatchError(AntishiftError, ValueError):
    pass


class SearchFailedError(AntishiftError, RuntimeError):
    pass


class SweepFailedError(AntishiftError, RuntimeError):
    pass
