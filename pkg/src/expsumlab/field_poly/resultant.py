"""Resultants, discriminants and the critical-value polynomial.

Exact resultants are computed fraction-free: denominators are cleared, the
Sylvester matrix is built over Z and its determinant taken with the Bareiss
algorithm (all intermediate divisions exact), then the denominator scaling
Res(f/a, g/b) = Res(f, g) / (a^deg(g) b^deg(f)) is undone.  Degrees in this
package stay below ~20, so the cubic cost of Bareiss is irrelevant and the
scheme is easy to audit against a plain fraction determinant.

The critical-value polynomial CV_f(Y) = Res_X(f'(X), Y - f(X)) is obtained
by evaluating the resultant at deg(f) interpolation nodes and Lagrange
interpolation; its roots, with multiplicity, are exactly the values of f at
the zeros of f', and deg CV_f = deg(f) - 1.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from ..errors import DegenerateDerivative
from .polyexact import PolyExact
from .polymod import PolyModP


def _bareiss_det(m: list[list[int]]) -> int:
    """Determinant of an integer matrix by fraction-free elimination."""
    n = len(m)
    if n == 0:
        return 1
    m = [row[:] for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def _sylvester(f: Sequence, g: Sequence, zero) -> list[list]:
    """Sylvester matrix of f and g (coefficient lists, constant first)."""
    n, m = len(f) - 1, len(g) - 1
    size = n + m
    rows = []
    frow = list(reversed(f))
    grow = list(reversed(g))
    for i in range(m):
        rows.append([zero] * i + frow + [zero] * (size - n - 1 - i))
    for i in range(n):
        rows.append([zero] * i + grow + [zero] * (size - m - 1 - i))
    return rows


def _clear_denominators(f: PolyExact) -> tuple[list[int], int]:
    """Return (integer coefficients, positive denominator) with f = ints/den."""
    den = 1
    for c in f.coeffs:
        den = den * c.denominator // _gcd_int(den, c.denominator)
    ints = [int(c * den) for c in f.coeffs]
    return ints, den


def _gcd_int(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def resultant(f: PolyExact, g: PolyExact) -> Fraction:
    """Res(f, g) over Q; equals lc(f)^deg(g) * prod g(roots of f)."""
    if f.is_zero or g.is_zero:
        raise ValueError("resultant of the zero polynomial")
    if f.degree == 0:
        return f.lead ** g.degree
    if g.degree == 0:
        return g.lead ** f.degree
    fi, a = _clear_denominators(f)
    gi, b = _clear_denominators(g)
    det = _bareiss_det(_sylvester(fi, gi, 0))
    return Fraction(det, a**g.degree * b**f.degree)


def resultant_mod_p(f: PolyModP, g: PolyModP) -> int:
    """Res(f, g) over F_p by Gaussian elimination on the Sylvester matrix."""
    if f.is_zero or g.is_zero:
        raise ValueError("resultant of the zero polynomial")
    p = f.p
    if f.degree == 0:
        return pow(f.lead, g.degree, p)
    if g.degree == 0:
        return pow(g.lead, f.degree, p)
    m = _sylvester(list(f.coeffs), list(g.coeffs), 0)
    n = len(m)
    det = 1
    for k in range(n):
        pivot = None
        for i in range(k, n):
            if m[i][k] % p:
                pivot = i
                break
        if pivot is None:
            return 0
        if pivot != k:
            m[k], m[pivot] = m[pivot], m[k]
            det = -det % p
        det = det * m[k][k] % p
        inv = pow(m[k][k], -1, p)
        for i in range(k + 1, n):
            factor = m[i][k] * inv % p
            if factor:
                for j in range(k, n):
                    m[i][j] = (m[i][j] - factor * m[k][j]) % p
    return det % p


def discriminant(f: PolyExact) -> Fraction:
    """disc(f) = (-1)^(d(d-1)/2) Res(f, f') / lc(f); nonzero iff f squarefree."""
    d = f.degree
    if d < 1:
        raise ValueError("discriminant needs deg f >= 1")
    if d == 1:
        return Fraction(1)
    sign = -1 if (d * (d - 1) // 2) % 2 else 1
    return sign * resultant(f, f.derivative()) / f.lead


def critical_value_poly(f: PolyExact) -> PolyExact:
    """Monic CV_f(Y) whose roots (with multiplicity) are the critical values.

    CV_f(Y) is proportional to Res_X(f'(X), Y - f(X)) and has degree d - 1.
    f is critical-value-distinct exactly when CV_f is squarefree.
    """
    d = f.degree
    if d < 2:
        raise ValueError("critical values need deg f >= 2")
    fp = f.derivative()
    if fp.degree < d - 1:
        raise DegenerateDerivative("deg f' < deg f - 1")
    nodes = [Fraction(i) for i in range(d)]
    vals = [resultant(fp, PolyExact((y,)) - f) for y in nodes]
    cv = _lagrange(nodes, vals)
    if cv.degree != d - 1:
        raise DegenerateDerivative("critical-value polynomial degenerated")
    return cv.scale(1 / cv.lead)


def critical_value_poly_mod_p(f: PolyModP) -> PolyModP:
    """Monic CV_f(Y) over F_p; requires p > 2 deg(f) - 1."""
    d = f.degree
    p = f.p
    if d < 2:
        raise ValueError("critical values need deg f >= 2")
    if p <= 2 * d - 1:
        raise DegenerateDerivative(f"need p > 2d-1 = {2 * d - 1}, got {p}")
    fp = f.derivative()
    if fp.degree < d - 1:
        raise DegenerateDerivative("deg f' < deg f - 1 after reduction")
    nodes = list(range(d))
    vals = []
    for y in nodes:
        shifted = PolyModP(p, (y,)) - f
        vals.append(resultant_mod_p(fp, shifted))
    cv = _lagrange_mod_p(nodes, vals, p)
    if cv.degree != d - 1:
        raise DegenerateDerivative("critical-value polynomial degenerated")
    return cv.monic()


def _lagrange(xs: Sequence[Fraction], ys: Sequence[Fraction]) -> PolyExact:
    acc = PolyExact(())
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        basis = PolyExact((Fraction(1),))
        denom = Fraction(1)
        for j, xj in enumerate(xs):
            if j != i:
                basis = basis * PolyExact((-xj, Fraction(1)))
                denom *= xi - xj
        acc = acc + basis.scale(yi / denom)
    return acc


def _lagrange_mod_p(xs: Sequence[int], ys: Sequence[int], p: int) -> PolyModP:
    acc = PolyModP(p, ())
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        basis = PolyModP(p, (1,))
        denom = 1
        for j, xj in enumerate(xs):
            if j != i:
                basis = basis * PolyModP(p, (-xj, 1))
                denom = denom * (xi - xj) % p
        acc = acc + basis.scale(yi * pow(denom, -1, p) % p)
    return acc
