"""Exact arithmetic over Q(i): scalars, matrices, polynomials."""

from .matrix import (
    Matrix,
    bilinear,
    dot,
    hstack,
    is_zero_vector,
    mat_mul,
    solve_in_span,
    vec,
    vec_add,
    vec_scale,
    vec_sub,
)
from .poly import (
    NotCyclotomic,
    Poly,
    char_poly,
    cyclotomic,
    cyclotomic_factorization,
    cyclotomic_poly,
    cyclotomic_product,
    jordan_partition,
    series_inverse,
    series_mul,
)
from .scalar import I, ONE, ZERO, GaussRational, Rational, gr, nth_roots, rational_sqrt, to_rational

__all__ = [
    "GaussRational", "Rational", "Matrix", "Poly", "I", "ONE", "ZERO", "gr",
    "to_rational", "rational_sqrt", "nth_roots", "mat_mul", "solve_in_span", "hstack", "bilinear", "dot", "vec",
    "vec_add", "vec_sub", "vec_scale", "is_zero_vector", "char_poly",
    "jordan_partition", "cyclotomic", "cyclotomic_poly", "cyclotomic_product",
    "cyclotomic_factorization", "NotCyclotomic", "series_inverse", "series_mul",
]
