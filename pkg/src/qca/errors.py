"""Exception hierarchy shared by all modules."""


class QcaError(Exception):
    """Base class for library errors."""


class ShapeError(QcaError, ValueError):
    """Matrix or vector has the wrong shape."""


class DomainError(QcaError, ValueError):
    """A parameter lies outside its admissible domain."""


class ContractError(QcaError, ValueError):
    """An input violates an operation's precondition (symmetry, physicality, ...)."""


class ValidationError(QcaError, ValueError):
    """A channel fails a validity check such as trace preservation."""
