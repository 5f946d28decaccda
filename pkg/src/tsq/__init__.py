"""Desk-scale toolkit for time-symmetrized quantum process analysis."""

__version__ = "0.1.0"

from .qcore import (  # noqa: F401
    InvariantError,
    RegisterLayout,
    StateVector,
    UnitaryOp,
)
