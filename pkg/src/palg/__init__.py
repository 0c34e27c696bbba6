"""Finite workbench for polyadic algebras.

Set algebras and table-backed algebras with cylindrifications and
substitutions, the postulate and additivity checks, functional dilations,
the ultrafilter representation construction with its verifier, and a
finite-support engine for dimension omega.
"""

__version__ = "0.1.0"

from .algebra import (BAO, FiniteBAO, FullSetAlgebra, Operator, degree_report, generated_subalgebra,
                      minimal_support, neat_reduct, non_additive_example, partition_algebra, to_bao)
from .core import DimensionSet, PointSpace, Transformation, compose, kernel_partition
from .errors import (CapacityError, DimensionError, MalformedInput, PalgError, ParseError,
                     UnboundVariable, UnsupportedOperation)

__all__ = [
    "BAO", "FiniteBAO", "FullSetAlgebra", "Operator", "degree_report", "generated_subalgebra",
    "minimal_support", "neat_reduct", "non_additive_example", "partition_algebra", "to_bao",
    "DimensionSet", "PointSpace", "Transformation", "compose", "kernel_partition",
    "CapacityError", "DimensionError", "MalformedInput", "PalgError", "ParseError",
    "UnboundVariable", "UnsupportedOperation",
]
