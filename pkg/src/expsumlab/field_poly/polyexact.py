"""Polynomials with exact rational coefficients.

These carry the phase polynomials and everything derived from them
(derivatives, critical-value polynomials, Dickson polynomials) before any
mod-p specialization.  Coefficients are fractions.Fraction, constant term
first.  Serialization uses JSON arrays of coefficient strings in "num/den"
syntax; that format is shared by every module and the CLI.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence, Union

from ..errors import BadReduction
from .polymod import PolyModP

Coeff = Union[int, Fraction, str]


def _to_fraction(c: Coeff) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    return Fraction(str(c))


def _trim(coeffs: Sequence[Fraction]) -> tuple[Fraction, ...]:
    n = len(coeffs)
    while n > 0 and coeffs[n - 1] == 0:
        n -= 1
    return tuple(coeffs[:n])


@dataclass(frozen=True)
class PolyExact:
    """Univariate polynomial over Q, constant term first."""

    coeffs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "coeffs", _trim([_to_fraction(c) for c in self.coeffs])
        )

    @classmethod
    def from_coeffs(cls, coeffs: Iterable[Coeff]) -> "PolyExact":
        return cls(tuple(_to_fraction(c) for c in coeffs))

    @classmethod
    def x_power(cls, d: int) -> "PolyExact":
        return cls(tuple([Fraction(0)] * d + [Fraction(1)]))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> Fraction:
        if self.is_zero:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def coeff(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def __add__(self, other: "PolyExact") -> "PolyExact":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return PolyExact(tuple(out))

    def __sub__(self, other: "PolyExact") -> "PolyExact":
        return self + (-other)

    def __neg__(self) -> "PolyExact":
        return PolyExact(tuple(-c for c in self.coeffs))

    def __mul__(self, other: "PolyExact") -> "PolyExact":
        if self.is_zero or other.is_zero:
            return PolyExact(())
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            if x:
                for j, y in enumerate(other.coeffs):
                    out[i + j] += x * y
        return PolyExact(tuple(out))

    def scale(self, k: Coeff) -> "PolyExact":
        k = _to_fraction(k)
        return PolyExact(tuple(c * k for c in self.coeffs))

    def __call__(self, x: Coeff) -> Fraction:
        x = _to_fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> "PolyExact":
        return PolyExact(tuple(i * c for i, c in enumerate(self.coeffs))[1:])

    def compose(self, inner: "PolyExact") -> "PolyExact":
        """self(inner(X)), by Horner over polynomials."""
        acc = PolyExact(())
        for c in reversed(self.coeffs):
            acc = acc * inner + PolyExact((c,))
        return acc

    def shift_arg(self, e: Coeff) -> "PolyExact":
        """f(X + e)."""
        return self.compose(PolyExact((_to_fraction(e), Fraction(1))))

    def scale_arg(self, c: Coeff) -> "PolyExact":
        """f(c X)."""
        c = _to_fraction(c)
        return PolyExact(tuple(coef * c**i for i, coef in enumerate(self.coeffs)))

    def divmod(self, other: "PolyExact") -> tuple["PolyExact", "PolyExact"]:
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.coeffs)
        db = other.degree
        if self.degree < db:
            return PolyExact(()), self
        q = [Fraction(0)] * (len(r) - db)
        inv = 1 / other.lead
        for i in range(len(r) - 1, db - 1, -1):
            f = r[i] * inv
            if f:
                q[i - db] = f
                for j in range(db + 1):
                    r[i - db + j] -= f * other.coeffs[j]
        return PolyExact(tuple(q)), PolyExact(tuple(r))

    # Serialization: the shared JSON coefficient format.

    def to_json(self) -> str:
        return json.dumps([_coeff_str(c) for c in self.coeffs])

    @classmethod
    def from_json(cls, text: str) -> "PolyExact":
        data = json.loads(text)
        if not isinstance(data, list):
            raise ValueError("polynomial JSON must be an array of coefficients")
        return cls.from_coeffs(data)

    def poly_id(self) -> str:
        """Stable hex digest of the exact coefficient vector."""
        payload = json.dumps([_coeff_str(c) for c in self.coeffs]).encode()
        return hashlib.sha256(payload).hexdigest()

    def __repr__(self) -> str:
        if self.is_zero:
            return "PolyExact(0)"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}*X^{i}" if i else str(c))
        return f"PolyExact({' + '.join(terms)})"


def _coeff_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


class Reduction(NamedTuple):
    poly: PolyModP
    degree_dropped: bool


def reduce_mod_p(f: PolyExact, p: int) -> Reduction:
    """Reduce an exact polynomial mod p.

    Raises BadReduction when p divides a coefficient denominator; flags a
    degree drop when p divides the leading numerator.
    """
    ints = []
    for c in f.coeffs:
        if c.denominator % p == 0:
            raise BadReduction(
                f"p={p} divides a coefficient denominator of {f!r}"
            )
        ints.append(c.numerator * pow(c.denominator, -1, p) % p)
    poly = PolyModP(p, tuple(ints))
    return Reduction(poly, degree_dropped=poly.degree < f.degree)


class CanonicalForm(NamedTuple):
    poly: PolyExact      # monic, zero X^(d-1) coefficient, zero constant
    a: Fraction          # canonical = a * f(c X + e) + b
    b: Fraction
    c: Fraction
    e: Fraction


def depress_and_normalize(f: PolyExact) -> CanonicalForm:
    """Canonical representative of f under affine equivalence with c = 1.

    Output is monic with vanishing X^(d-1) coefficient and zero constant
    term.  The records (a, b, c, e) map the input onto the output via
    a*f(cX + e) + b; every equivalence notion used downstream permits the
    additive constant b, which is why the constant term is dropped.
    """
    d = f.degree
    if d < 2:
        raise ValueError("canonical form needs deg f >= 2")
    a = 1 / f.lead
    e = -f.coeff(d - 1) / (d * f.lead)
    shifted = f.shift_arg(e).scale(a)
    b = -shifted.coeff(0)
    coeffs = list(shifted.coeffs)
    coeffs[0] = Fraction(0)
    return CanonicalForm(PolyExact(tuple(coeffs)), a, b, Fraction(1), e)
