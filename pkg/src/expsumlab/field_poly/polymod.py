"""Univariate polynomials over F_p with gcd, squarefreeness and factorization.

Coefficients are plain ints in [0, p), constant term first, trailing zeros
stripped; the zero polynomial has an empty coefficient tuple.  Factorization
is distinct-degree splitting (repeated squaring of X^p mod f) followed by
randomized equal-degree splitting; the random source is a seedable
random.Random so test runs are reproducible.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from ..errors import SmallCharacteristic
from .primefield import check_modulus


def _trim(coeffs: Sequence[int]) -> tuple[int, ...]:
    n = len(coeffs)
    while n > 0 and coeffs[n - 1] == 0:
        n -= 1
    return tuple(coeffs[:n])


@dataclass(frozen=True)
class PolyModP:
    """Polynomial over F_p; leading coefficient nonzero unless zero poly."""

    p: int
    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        check_modulus(self.p)
        object.__setattr__(
            self, "coeffs", _trim([c % self.p for c in self.coeffs])
        )

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> int:
        if self.is_zero:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def coeff(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def monic(self) -> "PolyModP":
        if self.is_zero or self.lead == 1:
            return self
        inv = pow(self.lead, -1, self.p)
        return PolyModP(self.p, [c * inv % self.p for c in self.coeffs])

    def __add__(self, other: "PolyModP") -> "PolyModP":
        return PolyModP(self.p, _add(self.coeffs, other.coeffs, self.p))

    def __sub__(self, other: "PolyModP") -> "PolyModP":
        return PolyModP(self.p, _sub(self.coeffs, other.coeffs, self.p))

    def __mul__(self, other: "PolyModP") -> "PolyModP":
        return PolyModP(self.p, _mul(self.coeffs, other.coeffs, self.p))

    def __neg__(self) -> "PolyModP":
        return PolyModP(self.p, [-c for c in self.coeffs])

    def scale(self, k: int) -> "PolyModP":
        return PolyModP(self.p, [c * k % self.p for c in self.coeffs])

    def shift_arg(self, e: int) -> "PolyModP":
        """Return f(X + e), computed by a Horner-style rewrite."""
        out: list[int] = []
        for c in reversed(self.coeffs):
            out = _add(_mul_linear(out, e, self.p), [c], self.p)
        return PolyModP(self.p, out)

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % self.p
        return acc

    def derivative(self) -> "PolyModP":
        return PolyModP(
            self.p, [i * c % self.p for i, c in enumerate(self.coeffs)][1:]
        )

    def divmod(self, other: "PolyModP") -> tuple["PolyModP", "PolyModP"]:
        q, r = _divmod(list(self.coeffs), other.coeffs, self.p)
        return PolyModP(self.p, q), PolyModP(self.p, r)

    def __repr__(self) -> str:
        if self.is_zero:
            return f"PolyModP(0 mod {self.p})"
        terms = [
            f"{c}*X^{i}" if i else str(c)
            for i, c in enumerate(self.coeffs)
            if c
        ]
        return f"PolyModP({' + '.join(terms)} mod {self.p})"


# Raw coefficient-list arithmetic; shared with callers that avoid the
# dataclass in tight loops (second-moment counting, extension fields).

def _add(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] = (out[i] + c) % p
    return out


def _sub(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    out = list(a)
    if len(out) < len(b):
        out.extend([0] * (len(b) - len(out)))
    for i, c in enumerate(b):
        out[i] = (out[i] - c) % p
    return out


def _mul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return out


def _mul_linear(a: Sequence[int], e: int, p: int) -> list[int]:
    """a(X) * (X + e)."""
    if not a:
        return []
    out = [0] + list(a)
    for i, c in enumerate(a):
        out[i] = (out[i] + c * e) % p
    return out


def _divmod(
    a: Sequence[int], b: Sequence[int], p: int
) -> tuple[list[int], list[int]]:
    b = _trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(a)
    db = len(b) - 1
    if len(r) - 1 < db:
        return [], list(_trim(r))
    inv = pow(b[-1], -1, p)
    q = [0] * (len(r) - db)
    for i in range(len(r) - 1, db - 1, -1):
        f = r[i] * inv % p
        if f:
            q[i - db] = f
            for j in range(db + 1):
                r[i - db + j] = (r[i - db + j] - f * b[j]) % p
    return q, list(_trim(r))


def _gcd(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    a, b = list(_trim(a)), list(_trim(b))
    while b:
        _, r = _divmod(a, b, p)
        a, b = b, r
    if a:
        inv = pow(a[-1], -1, p)
        a = [c * inv % p for c in a]
    return a


def _powmod(base: Sequence[int], n: int, mod: Sequence[int], p: int) -> list[int]:
    """base(X)^n reduced mod the polynomial `mod`, by square and multiply.

    Requires deg mod >= 1.
    """
    if len(_trim(mod)) < 2:
        raise ValueError("powmod needs a modulus of degree >= 1")
    result = [1]
    _, acc = _divmod(list(_trim(base)), mod, p)
    while n:
        if n & 1:
            result = _divmod(_mul(result, acc, p), mod, p)[1]
        n >>= 1
        if n:
            acc = _divmod(_mul(acc, acc, p), mod, p)[1]
    return result


def poly_gcd(f: PolyModP, g: PolyModP) -> PolyModP:
    """Monic gcd of f and g over F_p."""
    if f.is_zero and g.is_zero:
        raise ValueError("gcd(0, 0) is undefined")
    if f.p != g.p:
        raise ValueError("mixed moduli")
    return PolyModP(f.p, _gcd(f.coeffs, g.coeffs, f.p))


def is_squarefree(f: PolyModP) -> bool:
    """True iff gcd(f, f') = 1.

    Requires p > deg f so that f' cannot degenerate (an inseparable factor
    would make gcd(f, f') misleading in small characteristic).
    """
    if f.degree < 1:
        raise ValueError("squarefreeness needs deg f >= 1")
    if f.p <= f.degree:
        raise SmallCharacteristic(
            f"need p > deg f ({f.p} <= {f.degree})"
        )
    return len(_gcd(f.coeffs, f.derivative().coeffs, f.p)) == 1


def count_distinct_roots(f: PolyModP) -> int:
    """Number of distinct roots of f in F_p, via deg gcd(X^p - X, f)."""
    if f.is_zero:
        raise ValueError("zero polynomial")
    if f.degree == 0:
        return 0
    xp = _powmod([0, 1], f.p, f.coeffs, f.p)
    g = _gcd(_sub(xp, [0, 1], f.p), f.coeffs, f.p)
    return len(g) - 1


def _squarefree_part_decomposition(f: PolyModP) -> list[tuple[PolyModP, int]]:
    """Squarefree decomposition of monic f over F_p (handles f' = 0)."""
    p = f.p
    out: list[tuple[PolyModP, int]] = []

    def recurse(g: PolyModP, mult: int) -> None:
        if g.degree < 1:
            return
        d = g.derivative()
        if d.is_zero:
            # g = h(X^p); take the p-th root (Frobenius fixes F_p).
            root = PolyModP(p, g.coeffs[::p])
            recurse(root, mult * p)
            return
        c = poly_gcd(g, d)
        w = g.divmod(c)[0]  # squarefree part of g at multiplicity 1 layer
        i = 1
        while w.degree > 0:
            y = poly_gcd(w, c)
            z = w.divmod(y)[0]
            if z.degree > 0:
                out.append((z.monic(), mult * i))
            w = y
            c = c.divmod(y)[0]
            i += 1
        if c.degree > 0:
            recurse(c, mult)

    recurse(f.monic(), 1)
    return out


def _distinct_degree(f: PolyModP) -> list[tuple[PolyModP, int]]:
    """Split squarefree monic f into products of irreducibles of equal degree."""
    p = f.p
    out: list[tuple[PolyModP, int]] = []
    h = [0, 1]  # X, raised to successive powers of p mod f
    rest = f
    d = 0
    while rest.degree > 2 * (d + 1) - 1 and rest.degree > 0:
        d += 1
        h = _powmod(h, p, rest.coeffs, p)
        g = _gcd(_sub(h, [0, 1], p), rest.coeffs, p)
        if len(g) > 1:
            gp = PolyModP(p, g)
            out.append((gp, d))
            rest = rest.divmod(gp)[0]
            _, hr = _divmod(h, rest.coeffs, p)
            h = hr
    if rest.degree > 0:
        out.append((rest.monic(), rest.degree))
    return out


def _equal_degree_split(
    f: PolyModP, d: int, rng: random.Random
) -> list[PolyModP]:
    """Cantor-Zassenhaus split of a product of degree-d irreducibles (p odd)."""
    p = f.p
    if f.degree == d:
        return [f.monic()]
    exp = (pow(p, d) - 1) // 2
    while True:
        a = [rng.randrange(p) for _ in range(f.degree)]
        a.append(1)
        t = _powmod(a, exp, f.coeffs, p)
        g = _gcd(_sub(t, [1], p), f.coeffs, p)
        if 0 < len(g) - 1 < f.degree:
            gp = PolyModP(p, g)
            other = f.divmod(gp)[0]
            return _equal_degree_split(gp, d, rng) + _equal_degree_split(
                other, d, rng
            )


def factor_mod_p(f: PolyModP, seed: int = 0) -> list[tuple[PolyModP, int]]:
    """Full factorization of f into monic irreducibles with multiplicities.

    The leading unit is dropped; the product of factor^multiplicity times
    lead(f) reconstructs f.  Output is sorted by (degree, coefficients) so
    runs are deterministic for a fixed seed.
    """
    if f.degree < 1:
        raise ValueError("factorization needs deg f >= 1")
    rng = random.Random(seed)
    factors: list[tuple[PolyModP, int]] = []
    for part, mult in _squarefree_part_decomposition(f):
        for block, d in _distinct_degree(part):
            for irr in _equal_degree_split(block, d, rng):
                factors.append((irr, mult))
    factors.sort(key=lambda fm: (fm[0].degree, fm[0].coeffs))
    return factors


def product(polys: Iterable[PolyModP], p: int) -> PolyModP:
    acc = PolyModP(p, (1,))
    for q in polys:
        acc = acc * q
    return acc
