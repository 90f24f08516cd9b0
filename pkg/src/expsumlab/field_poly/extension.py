"""Extension fields F_{p^e} and root enumeration inside them.

An ExtField is F_p[t] / (m(t)) for a monic irreducible m of degree e; the
modulus is verified irreducible at construction.  splitting_roots places all
roots of a squarefree polynomial over F_p inside one common extension whose
degree is the lcm of the irreducible factor degrees, so that Sidon-type
tests can add and compare critical values freely.  Roots belonging to one
irreducible factor form a full Frobenius orbit {r, r^p, r^{p^2}, ...}.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Sequence

from ..errors import ExtensionTooLarge
from .polymod import PolyModP, _divmod, _gcd, _mul, _powmod, _sub, _trim, factor_mod_p

DEFAULT_EXTENSION_CAP = 64


class ExtField:
    """F_{p^e} presented as F_p[t] mod a monic irreducible modulus."""

    def __init__(self, p: int, modulus: Sequence[int]):
        modulus = tuple(c % p for c in modulus)
        mod_poly = PolyModP(p, modulus)
        if mod_poly.degree < 1 or mod_poly.lead != 1:
            raise ValueError("modulus must be monic of degree >= 1")
        if mod_poly.degree > 1 and not _is_irreducible(mod_poly):
            raise ValueError(f"modulus {mod_poly!r} is reducible")
        self.p = p
        self.degree = mod_poly.degree
        self.modulus = mod_poly.coeffs

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ExtField)
            and self.p == other.p
            and self.modulus == other.modulus
        )

    def __hash__(self) -> int:
        return hash((self.p, self.modulus))

    @property
    def order(self) -> int:
        return self.p**self.degree

    def element(self, coeffs: Sequence[int]) -> "ExtFieldElem":
        _, red = _divmod([c % self.p for c in coeffs], self.modulus, self.p)
        return ExtFieldElem(self, _pad(red, self.degree))

    def from_base(self, x: int) -> "ExtFieldElem":
        return self.element([x])

    def zero(self) -> "ExtFieldElem":
        return self.element([])

    def one(self) -> "ExtFieldElem":
        return self.element([1])

    def gen(self) -> "ExtFieldElem":
        return self.element([0, 1])

    def __repr__(self) -> str:
        return f"ExtField(p={self.p}, degree={self.degree})"


def _pad(coeffs: Sequence[int], e: int) -> tuple[int, ...]:
    out = list(coeffs) + [0] * (e - len(coeffs))
    return tuple(out[:e])


@dataclass(frozen=True)
class ExtFieldElem:
    """Element of F_{p^e}, stored as a length-e coefficient vector."""

    field: ExtField
    coeffs: tuple[int, ...]

    def _check(self, other: "ExtFieldElem") -> None:
        if self.field != other.field:
            raise ValueError("elements from different extensions")

    def __add__(self, other: "ExtFieldElem") -> "ExtFieldElem":
        self._check(other)
        p = self.field.p
        return ExtFieldElem(
            self.field,
            tuple((a + b) % p for a, b in zip(self.coeffs, other.coeffs)),
        )

    def __sub__(self, other: "ExtFieldElem") -> "ExtFieldElem":
        self._check(other)
        p = self.field.p
        return ExtFieldElem(
            self.field,
            tuple((a - b) % p for a, b in zip(self.coeffs, other.coeffs)),
        )

    def __neg__(self) -> "ExtFieldElem":
        p = self.field.p
        return ExtFieldElem(self.field, tuple(-a % p for a in self.coeffs))

    def __mul__(self, other: "ExtFieldElem") -> "ExtFieldElem":
        self._check(other)
        p = self.field.p
        prod = _mul(_trim(self.coeffs), _trim(other.coeffs), p)
        _, red = _divmod(prod, self.field.modulus, p)
        return ExtFieldElem(self.field, _pad(red, self.field.degree))

    def scale(self, k: int) -> "ExtFieldElem":
        p = self.field.p
        return ExtFieldElem(self.field, tuple(a * k % p for a in self.coeffs))

    def inverse(self) -> "ExtFieldElem":
        if self.is_zero:
            raise ZeroDivisionError("0 has no inverse")
        p = self.field.p
        # Extended Euclid in F_p[t] against the modulus.
        r0, r1 = list(self.field.modulus), list(_trim(self.coeffs))
        s0, s1 = [], [1]
        while r1:
            q, r = _divmod(r0, r1, p)
            r0, r1 = r1, r
            s0, s1 = s1, _sub(s0, _mul(q, s1, p), p)
        inv_lead = pow(r0[-1], -1, p)
        s0 = [c * inv_lead % p for c in s0]
        _, red = _divmod(s0, self.field.modulus, p)
        return ExtFieldElem(self.field, _pad(red, self.field.degree))

    def __pow__(self, n: int) -> "ExtFieldElem":
        if n < 0:
            return self.inverse() ** (-n)
        red = _powmod(_trim(self.coeffs), n, self.field.modulus, self.field.p)
        return ExtFieldElem(self.field, _pad(red, self.field.degree))

    def frobenius(self) -> "ExtFieldElem":
        return self ** self.field.p

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def in_prime_field(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def to_int(self) -> int:
        """Value as an element of F_p; raises if not in the prime field."""
        if not self.in_prime_field():
            raise ValueError(f"{self!r} is not in the prime field")
        return self.coeffs[0]

    def __repr__(self) -> str:
        return f"ExtFieldElem({list(self.coeffs)} over {self.field!r})"


def _is_irreducible(f: PolyModP) -> bool:
    """Irreducibility over F_p via x^(p^e) = x and gcd filters at e/l."""
    p, e = f.p, f.degree
    x = [0, 1]
    xq = _powmod(x, p**e, f.coeffs, p)
    if _trim(_sub(xq, x, p)):
        return False
    for ell in _prime_divisors(e):
        xm = _powmod(x, p ** (e // ell), f.coeffs, p)
        if len(_gcd(_sub(xm, x, p), f.coeffs, p)) != 1:
            return False
    return True


def _prime_divisors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def find_irreducible(p: int, e: int, seed: int = 0) -> PolyModP:
    """A monic irreducible of degree e over F_p (seeded random search)."""
    if e == 1:
        return PolyModP(p, (0, 1))
    rng = random.Random((seed, p, e).__hash__())
    while True:
        coeffs = [rng.randrange(p) for _ in range(e)] + [1]
        cand = PolyModP(p, coeffs)
        if _is_irreducible(cand):
            return cand


def build_field(p: int, e: int, seed: int = 0) -> ExtField:
    return ExtField(p, find_irreducible(p, e, seed).coeffs)


def _roots_in_field(
    poly: list["ExtFieldElem"], field: ExtField, rng: random.Random
) -> list["ExtFieldElem"]:
    """All roots in `field` of a monic squarefree poly that splits there.

    Coefficients are ExtFieldElems, constant first.  Equal-degree splitting
    with random shifts; exponent (q-1)/2 works since p is odd.
    """
    deg = len(poly) - 1
    if deg == 0:
        return []
    if deg == 1:
        return [-poly[0] * poly[1].inverse()]
    q = field.order
    one = field.one()
    while True:
        delta = field.element(
            [rng.randrange(field.p) for _ in range(field.degree)]
        )
        # h = (X + delta)^((q-1)/2) mod poly
        h = _ext_powmod([delta, one], (q - 1) // 2, poly, field)
        h = list(h)
        if not h:
            h = [field.zero()]
        h[0] = h[0] - one
        g = _ext_gcd(h, poly, field)
        if 0 < len(g) - 1 < deg:
            quot = _ext_div(poly, g, field)
            return _roots_in_field(g, field, rng) + _roots_in_field(
                quot, field, rng
            )


def _ext_trim(a: list["ExtFieldElem"]) -> list["ExtFieldElem"]:
    n = len(a)
    while n > 0 and a[n - 1].is_zero:
        n -= 1
    return a[:n]


def _ext_divmod(a, b, field):
    b = _ext_trim(list(b))
    r = list(a)
    db = len(b) - 1
    if db < 0:
        raise ZeroDivisionError
    inv = b[-1].inverse()
    q = [field.zero()] * max(len(r) - db, 0)
    for i in range(len(r) - 1, db - 1, -1):
        f = r[i] * inv
        if not f.is_zero:
            q[i - db] = f
            for j in range(db + 1):
                r[i - db + j] = r[i - db + j] - f * b[j]
    return q, _ext_trim(r)


def _ext_div(a, b, field):
    q, _ = _ext_divmod(a, b, field)
    return _ext_trim(q)


def _ext_gcd(a, b, field):
    a, b = _ext_trim(list(a)), _ext_trim(list(b))
    while b:
        _, r = _ext_divmod(a, b, field)
        a, b = b, r
    inv = a[-1].inverse()
    return [c * inv for c in a]


def _ext_powmod(base, n, mod, field):
    result = [field.one()]
    _, acc = _ext_divmod(list(base), mod, field)
    while n:
        if n & 1:
            result = _ext_divmod(_ext_mul(result, acc, field), mod, field)[1]
        n >>= 1
        if n:
            acc = _ext_divmod(_ext_mul(acc, acc, field), mod, field)[1]
    return result


def _ext_mul(a, b, field):
    if not a or not b:
        return []
    out = [field.zero()] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if not x.is_zero:
            for j, y in enumerate(b):
                out[i + j] = out[i + j] + x * y
    return _ext_trim(out)


def splitting_roots(
    f: PolyModP,
    cap: int = DEFAULT_EXTENSION_CAP,
    seed: int = 0,
) -> list[ExtFieldElem]:
    """All deg(f) roots of squarefree f inside one common extension.

    The extension degree is the lcm of the irreducible factor degrees.
    Raises ExtensionTooLarge when that exceeds the cap (default 64; the
    polynomials this package studies keep it in single digits).
    """
    if f.degree < 1:
        raise ValueError("need deg f >= 1")
    factors = factor_mod_p(f, seed=seed)
    if any(mult > 1 for _, mult in factors):
        raise ValueError("splitting_roots requires a squarefree input")
    e = 1
    for irr, _ in factors:
        e = e * irr.degree // math.gcd(e, irr.degree)
    if e > cap:
        raise ExtensionTooLarge(f"splitting field degree {e} exceeds cap {cap}")
    field = build_field(f.p, e, seed=seed)
    rng = random.Random((seed, f.p, f.coeffs).__hash__())
    roots: list[ExtFieldElem] = []
    for irr, _ in factors:
        lifted = [field.from_base(c) for c in irr.coeffs]
        got = _roots_in_field(lifted, field, rng)
        if len(got) != irr.degree:
            raise RuntimeError("factor did not split in the common extension")
        roots.extend(got)
    for r in roots:
        if not _ext_eval(f, r).is_zero:
            raise RuntimeError("claimed root fails substitution check")
    return roots


def _ext_eval(f: PolyModP, x: ExtFieldElem) -> ExtFieldElem:
    acc = x.field.zero()
    for c in reversed(f.coeffs):
        acc = acc * x + x.field.from_base(c)
    return acc
