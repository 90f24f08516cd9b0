"""Prime fields F_p for odd primes p < 2^62.

All arithmetic is exact integer arithmetic mod p; no floating point enters
this module.  Python integers make the 2^62 bound a safety contract rather
than an overflow concern, but it is still enforced so that tables and cache
formats elsewhere can rely on 64-bit storage.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

MAX_PRIME = 1 << 62

# Deterministic Miller-Rabin witness set, valid for all n < 3.3 * 10^24,
# comfortably covering the 2^62 contract.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic primality check for n < 2^64."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@lru_cache(maxsize=4096)
def check_modulus(p: int) -> None:
    """Validate an odd prime modulus below 2^62 (raises ValueError)."""
    if not (2 < p < MAX_PRIME):
        raise ValueError(f"modulus must be an odd prime below 2^62, got {p}")
    if not is_prime(p):
        raise ValueError(f"modulus {p} is not prime")


@dataclass(frozen=True)
class PrimeFieldElem:
    """An element of F_p, stored as the canonical representative in [0, p)."""

    value: int
    modulus: int

    def __post_init__(self) -> None:
        check_modulus(self.modulus)
        object.__setattr__(self, "value", self.value % self.modulus)

    def _coerce(self, other) -> "PrimeFieldElem":
        if isinstance(other, PrimeFieldElem):
            if other.modulus != self.modulus:
                raise ValueError("mixed moduli")
            return other
        return PrimeFieldElem(int(other), self.modulus)

    def __add__(self, other) -> "PrimeFieldElem":
        o = self._coerce(other)
        return PrimeFieldElem(self.value + o.value, self.modulus)

    __radd__ = __add__

    def __sub__(self, other) -> "PrimeFieldElem":
        o = self._coerce(other)
        return PrimeFieldElem(self.value - o.value, self.modulus)

    def __rsub__(self, other) -> "PrimeFieldElem":
        return self._coerce(other) - self

    def __mul__(self, other) -> "PrimeFieldElem":
        o = self._coerce(other)
        return PrimeFieldElem(self.value * o.value, self.modulus)

    __rmul__ = __mul__

    def __neg__(self) -> "PrimeFieldElem":
        return PrimeFieldElem(-self.value, self.modulus)

    def inverse(self) -> "PrimeFieldElem":
        if self.value == 0:
            raise ZeroDivisionError("0 has no inverse in F_p")
        return PrimeFieldElem(pow(self.value, -1, self.modulus), self.modulus)

    def __truediv__(self, other) -> "PrimeFieldElem":
        return self * self._coerce(other).inverse()

    def __pow__(self, n: int) -> "PrimeFieldElem":
        if n < 0:
            return self.inverse() ** (-n)
        return PrimeFieldElem(pow(self.value, n, self.modulus), self.modulus)

    def __int__(self) -> int:
        return self.value

    def __bool__(self) -> bool:
        return self.value != 0

    def __repr__(self) -> str:
        return f"{self.value} (mod {self.modulus})"
