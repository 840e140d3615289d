"""Exact arithmetic: rationals, sparse polynomials in w, x, z, factored rational functions."""
from .polynomial import W, X, Z, DegreeCapError, LinearForm, Monomial, Polynomial, linear, poly_sum
from .ratfunc import PoleError, RationalFunction, rf_eq, rf_eval, rf_normalize, rf_sum

__all__ = [
    "W", "X", "Z", "DegreeCapError", "LinearForm", "Monomial", "Polynomial", "linear", "poly_sum",
    "PoleError", "RationalFunction", "rf_eq", "rf_eval", "rf_normalize", "rf_sum",
]
