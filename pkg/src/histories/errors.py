"""Exception hierarchy shared by the simulation modules."""


class HistoriesError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(HistoriesError, ValueError):
    """Operand shapes do not agree."""


class ContractViolation(HistoriesError, ValueError):
    """An input breaks a documented precondition (hermiticity, unitarity, ...)."""


class UndefinedInputError(HistoriesError, ValueError):
    """The requested quantity is undefined for this input (e.g. a zero vector)."""


class UnsupportedInputError(HistoriesError, ValueError):
    """The input is well-formed but outside the supported special case."""


class PostSelectionError(HistoriesError, RuntimeError):
    """A conditioning event has zero probability."""
