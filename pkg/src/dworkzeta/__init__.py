"""Exact point counts and zeta functions over small finite fields.

The pipeline: lift the defining polynomial into a truncated p-adic ring,
expand Dwork's splitting-function product F, reduce the associated
Frobenius matrix modulo p^N on a finite cone of monomials, and read point
counts off the trace of its semilinear power.  A naive enumeration oracle
provides ground truth throughout the test suite.
"""

from .errors import Error
from .ffield import FieldSpec, Poly, make_field, parse_poly

__all__ = ["Error", "FieldSpec", "Poly", "make_field", "parse_poly"]
