"""Certified solver for (n, k)-systems of sets, an exact engine for the
set-picking game, and leaf/path tools for branching subposets of the
Boolean lattice."""

from .core import (
    SetSystem,
    SolutionMatrix,
    are_compatible,
    are_equivalent,
    is_regular,
    is_representative,
    prefix_sets,
    validate_system,
    verify_solution,
)
from .solver import solve

__version__ = "0.1.0"

__all__ = [
    "SetSystem",
    "SolutionMatrix",
    "are_compatible",
    "are_equivalent",
    "is_regular",
    "is_representative",
    "prefix_sets",
    "solve",
    "validate_system",
    "verify_solution",
]
