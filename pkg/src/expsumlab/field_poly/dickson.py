"""Dickson polynomials D_d(X, a).

D_d is the unique polynomial with D_d(x + a/x, a) = x^d + (a/x)^d; it is
generated here by the recurrence D_0 = 2, D_1 = X,
D_n = X * D_{n-1} - a * D_{n-2}.  D_d(X, 0) = X^d, and the family is the
exceptional case in the irreducibility criterion used by the classifier.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

from .polyexact import PolyExact

_X = PolyExact((Fraction(0), Fraction(1)))


def dickson(d: int, a: Union[int, Fraction, str]) -> PolyExact:
    """The degree-d Dickson polynomial with parameter a, over Q."""
    if d < 0:
        raise ValueError("d must be >= 0")
    a = a if isinstance(a, Fraction) else Fraction(str(a))
    if d == 0:
        return PolyExact((Fraction(2),))
    prev, cur = PolyExact((Fraction(2),)), _X
    for _ in range(d - 1):
        prev, cur = cur, _X * cur - prev.scale(a)
    return cur
