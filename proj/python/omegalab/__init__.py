"""Counting integers by distinct prime factors in prime partitions."""

from ._core import (
    CapacityError,
    Error,
    Lab,
    NumericError,
    ValidationError,
    census,
    parse_k_grid,
    parse_x,
)

__all__ = [
    "CapacityError",
    "Error",
    "Lab",
    "NumericError",
    "ValidationError",
    "census",
    "parse_k_grid",
    "parse_x",
]
