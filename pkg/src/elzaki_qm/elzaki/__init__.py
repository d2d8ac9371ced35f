"""Symbolic Elzaki transform engine."""

from .appendix import (
    bessel_image,
    infinite_square_well_levels,
    shm_image,
    solve_bessel_zeroth,
    solve_shm,
)
from .expr import Expr, Term
from .image import TransformExpr, TransformTerm
from .operator import ImageOperator, solve_first_order
from .parse import parse_expr, parse_prefix_expr, parse_prefix_transform
from .table import TableRow, appendix_table
from .transform import (
    convolve,
    derivative_image,
    elzaki_numeric,
    elzaki_quad,
    elzaki_transform,
    inverse_elzaki,
    laplace_dual,
    shifted_transform,
    t_multiplied_image,
)

__all__ = [
    "Expr",
    "Term",
    "TransformExpr",
    "TransformTerm",
    "ImageOperator",
    "TableRow",
    "appendix_table",
    "bessel_image",
    "convolve",
    "derivative_image",
    "elzaki_numeric",
    "elzaki_quad",
    "elzaki_transform",
    "infinite_square_well_levels",
    "inverse_elzaki",
    "laplace_dual",
    "parse_expr",
    "parse_prefix_expr",
    "parse_prefix_transform",
    "shifted_transform",
    "shm_image",
    "solve_bessel_zeroth",
    "solve_first_order",
    "solve_shm",
    "t_multiplied_image",
]
