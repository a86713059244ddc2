"""Qubit channels from one- and two-qubit environments and their Bloch-sphere geometry."""

__version__ = "0.1.0"

from qca.errors import ContractError, DomainError, QcaError, ShapeError, ValidationError

__all__ = [
    "__version__",
    "QcaError",
    "ShapeError",
    "DomainError",
    "ContractError",
    "ValidationError",
]
