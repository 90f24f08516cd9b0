"""Normalized complete exponential sums and their twisted extension.

For a prime p and phase polynomial f, the table holds
W(a;p) = p^(-1/2) * sum_x e(a f(x) / p) for every a at once: the value
distribution N[v] = #{x : f(x) = v} is tallied in one Horner pass, and the
whole table is its length-p discrete Fourier transform (numpy's pocketfft,
which switches to Bluestein's chirp factorization for prime lengths), so
the cost is O(p log p) instead of p independent summations.  sum_single
keeps the direct summation as the anchor for spot checks.

Extension to squarefree q is by twisted multiplicativity,
W(a; q1 q2) = W(a q1bar; q2) W(a q2bar; q1) for coprime q1, q2, peeled
prime by prime; W(a;q) is 0 by definition whenever q is not squarefree or
gcd(a, q) > 1.  Raw tables keep the a = 0 entry (it is sqrt(p), useful for
Parseval) but every moment / extension consumer sees it masked to 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import MissingTable, NonSquarefree, NotAMeasure, PrimeTooLarge
from .field_poly import PolyExact, PolyModP
from .genericity import BadCharacteristic, CriticalData

DEFAULT_PRIME_CAP = 1 << 22  # ~4M complex entries, ~64 MB per table


@dataclass(frozen=True)
class ValueDist:
    """Fiber counts N[v] = #{x in F_p : f(x) = v}; sum_v N[v] = p."""

    p: int
    counts: np.ndarray  # shape (p,), integer dtype

    def __post_init__(self):
        if len(self.counts) != self.p:
            raise ValueError("counts must have length p")

    @property
    def second_power_sum(self) -> int:
        """sum_v N[v]^2 = #{(x, y) : f(x) = f(y)}, exact integer."""
        c = self.counts.astype(np.int64)
        return int(np.dot(c, c))


@dataclass(frozen=True)
class SumTable:
    """All values W(a;p) (or a normalized variant) for one prime.

    values[0] is the raw a = 0 entry (sqrt(p) for the plain kind); use
    masked() for anything feeding moments or the twisted extension.
    """

    p: int
    poly_id: str
    kind: str  # plain | normalized | measure
    values: np.ndarray  # complex128, length p
    error_bound: float

    def masked(self) -> np.ndarray:
        out = self.values.copy()
        out[0] = 0.0
        return out

    def value(self, a: int) -> complex:
        """W(a;p) with the masking policy applied."""
        a %= self.p
        if a == 0:
            return 0.0 + 0.0j
        return complex(self.values[a])


@dataclass
class TwistedEnvelope:
    """Per-prime sup bounds G(p) and averages g(p), with a uniform cap M.

    g(p) <= G(p) <= M for every stored prime; both extend to squarefree q
    multiplicatively.
    """

    bounds: dict[int, float]
    averages: dict[int, float]
    cap: float

    def __post_init__(self):
        for p, G in self.bounds.items():
            g = self.averages[p]
            if not (g <= G + 1e-12 and G <= self.cap + 1e-12):
                raise ValueError(f"envelope violated at p={p}: g={g} G={G} M={self.cap}")

    @classmethod
    def from_tables(
        cls, tables: Mapping[int, "SumTable"], power: int = 1
    ) -> "TwistedEnvelope":
        bounds, averages = {}, {}
        for p, table in tables.items():
            mags = np.abs(table.masked()) ** power
            bounds[p] = float(mags.max())
            averages[p] = float(mags.sum() / p)
        cap = max(bounds.values()) if bounds else 1.0
        return cls(bounds, averages, cap)


def _fft_error_bound(p: int, mass: float) -> float:
    # Backward-stable FFT: per-entry error of order eps * log2(p) * total mass,
    # divided by sqrt(p) after normalization; factor 8 for slack.
    eps = np.finfo(np.float64).eps
    return 8.0 * eps * math.log2(max(p, 2)) * mass / math.sqrt(p)


def value_distribution(f: PolyModP) -> ValueDist:
    """One Horner pass over F_p tallying the values of f."""
    if f.degree < 1:
        raise ValueError("need deg f >= 1")
    p = f.p
    x = np.arange(p, dtype=np.int64)
    acc = np.zeros(p, dtype=np.int64)
    for c in reversed(f.coeffs):
        acc = (acc * x + c) % p
    counts = np.bincount(acc, minlength=p)
    return ValueDist(p, counts)


def sum_single(f: PolyModP, a: int) -> complex:
    """Direct summation of W(a;p); the independent anchor for the tables."""
    p = f.p
    x = np.arange(p, dtype=np.int64)
    acc = np.zeros(p, dtype=np.int64)
    for c in reversed(f.coeffs):
        acc = (acc * x + c) % p
    phases = np.exp((2j * math.pi * (a % p) / p) * acc)
    return complex(phases.sum() / math.sqrt(p))


def sum_table(
    f: PolyModP,
    cap: int = DEFAULT_PRIME_CAP,
    dist: Optional[ValueDist] = None,
) -> SumTable:
    """W(a;p) for all a at once via the value distribution and one DFT."""
    p = f.p
    if p > cap:
        raise PrimeTooLarge(f"p={p} exceeds the table cap {cap}")
    if dist is None:
        dist = value_distribution(f)
    return table_from_distribution(dist, poly_id_mod_p(f))


def table_from_distribution(dist: ValueDist, poly_id: str) -> SumTable:
    """The DFT step alone, for callers that cache value distributions."""
    p = dist.p
    spectrum = np.fft.fft(dist.counts.astype(np.float64))
    values = np.conj(spectrum) / math.sqrt(p)
    return SumTable(
        p=p,
        poly_id=poly_id,
        kind="plain",
        values=values,
        error_bound=_fft_error_bound(p, float(p)),
    )


def poly_id_mod_p(f: PolyModP) -> str:
    return PolyExact.from_coeffs([int(c) for c in f.coeffs]).poly_id()


def legendre_symbols(p: int) -> np.ndarray:
    """chi(a) for a = 0..p-1 as int8 (0 at a=0), via the residue table."""
    chi = -np.ones(p, dtype=np.int8)
    squares = (np.arange(1, p, dtype=np.int64) ** 2) % p
    chi[squares] = 1
    chi[0] = 0
    return chi


def normalized_table(
    f: PolyModP,
    data: Optional[CriticalData] = None,
    odd_witness: Optional[tuple] = None,
    cap: int = DEFAULT_PRIME_CAP,
) -> SumTable:
    """The normalized table W~ for f.

    Non-symmetric (critical data given): W~(a) = chi(a)^(d-1) e(a c/p) W(a)
    with c the critical shift.  Symmetric (odd witness (x0, delta, g)
    given): W~(a) = e(-a delta/p) W(a).  Either way |W~(a)| = |W(a)| for
    every a, asserted to 1e-12; the a = 0 entry is 0 by definition.
    """
    p = f.p
    d = f.degree
    if (d - 1) % p == 0:
        raise BadCharacteristic(f"p = {p} divides d-1 = {d - 1}")
    table = sum_table(f, cap=cap)
    a = np.arange(p)
    if odd_witness is not None:
        delta = odd_witness[1]
        delta_int = (
            delta.numerator * pow(delta.denominator, -1, p) % p
            if hasattr(delta, "numerator") and hasattr(delta, "denominator")
            else int(delta) % p
        )
        twist = np.exp(-2j * math.pi * delta_int / p * a)
    elif data is not None:
        c = data.shift.value
        twist = np.exp(2j * math.pi * c / p * a).astype(np.complex128)
        if (d - 1) % 2 == 1:
            twist = twist * legendre_symbols(p)
    else:
        raise ValueError("need critical data or an odd witness")
    values = table.values * twist
    # the twist is unit-modulus away from a=0, so magnitudes must agree
    drift = np.abs(np.abs(values[1:]) - np.abs(table.values[1:])).max()
    if drift > 1e-12 * max(1.0, float(np.abs(table.values).max())):
        raise AssertionError(f"normalization changed magnitudes by {drift}")
    values[0] = 0.0  # the normalized trace vanishes at a = 0
    return SumTable(
        p=p,
        poly_id=table.poly_id,
        kind="normalized",
        values=values,
        error_bound=table.error_bound,
    )


def _factorize(q: int) -> list[int]:
    out = []
    d = 2
    while d * d <= q:
        if q % d == 0:
            out.append(d)
            while q % d == 0:
                q //= d
        d += 1
    if q > 1:
        out.append(q)
    return out


def is_squarefree_int(q: int) -> bool:
    d = 2
    while d * d <= q:
        if q % (d * d) == 0:
            return False
        if q % d == 0:
            q //= d
        d += 1
    return True


def twisted_extend(
    tables: Mapping[int, SumTable],
    a: int,
    q: int,
    strict: bool = False,
) -> complex:
    """W(a;q) for squarefree q from the per-prime tables.

    Peels the twisted-multiplicativity relation prime by prime:
    W(a;q) = prod over p|q of W(a * inv(q/p) mod p; p).  The peeling order
    does not change the product.  Returns 0 for non-squarefree q or
    gcd(a,q) > 1 (the defining convention) unless strict, which raises.
    """
    if q < 1:
        raise ValueError("q must be positive")
    if q == 1:
        return 1.0 + 0.0j
    primes = _factorize(q)
    sqfree = math.prod(primes) == q
    if not sqfree:
        if strict:
            raise NonSquarefree(f"q={q} is not squarefree")
        return 0.0 + 0.0j
    if math.gcd(a, q) > 1:
        return 0.0 + 0.0j
    w = 1.0 + 0.0j
    for p in primes:
        table = tables.get(p)
        if table is None:
            raise MissingTable(f"no table for prime {p} dividing q={q}")
        cof = (q // p) % p
        idx = a % p * pow(cof, -1, p) % p
        w *= table.value(idx)
    return w


def direct_sum_modq(f: PolyExact, a: int, q: int) -> complex:
    """Brute-force (1/sqrt(q)) sum_{x mod q} e(a f(x)/q); CRT oracle."""
    coeffs = []
    for c in f.coeffs:
        if c.denominator != 1 and math.gcd(c.denominator, q) != 1:
            raise ValueError("denominator shares a factor with q")
        coeffs.append(c.numerator * pow(c.denominator, -1, q) % q)
    x = np.arange(q, dtype=np.int64)
    acc = np.zeros(q, dtype=np.int64)
    for c in reversed(coeffs):
        acc = (acc * x + c) % q
    phases = np.exp((2j * math.pi * (a % q) / q) * acc)
    return complex(phases.sum() / math.sqrt(q))


def measure_transform(
    p: int, v: Sequence[float]
) -> tuple[SumTable, TwistedEnvelope]:
    """Fourier transform V(a;p) = sum_b v(b) e(ab/p) of a probability vector.

    The envelope takes G(p) = 1 and g(p) = (sum_b v(b)^2 - 1/p)^(1/2),
    which dominates the average of |V| by Cauchy-Schwarz and Parseval.
    """
    arr = np.asarray(v, dtype=np.float64)
    if len(arr) != p:
        raise NotAMeasure(f"vector length {len(arr)} != p = {p}")
    if arr.min() < -1e-12 or abs(arr.sum() - 1.0) > 1e-9:
        raise NotAMeasure("entries must be nonnegative and sum to 1")
    values = np.conj(np.fft.fft(arr))
    g = math.sqrt(max(float(np.dot(arr, arr)) - 1.0 / p, 0.0))
    table = SumTable(
        p=p,
        poly_id="measure",
        kind="measure",
        values=values,
        error_bound=_fft_error_bound(p, 1.0),
    )
    env = TwistedEnvelope(bounds={p: 1.0}, averages={p: g}, cap=1.0)
    return table, env


@dataclass(frozen=True)
class WeilReport:
    p: int
    degree: int
    max_modulus: float
    margin: float       # (d-1) - max over coprime a of |W(a;p)|
    violated: bool


def weil_check(table: SumTable, d: int) -> WeilReport:
    """max |W(a;p)| over a != 0 against the d-1 square-root-cancellation bound."""
    mags = np.abs(table.masked())
    max_mod = float(mags.max())
    margin = (d - 1) - max_mod
    return WeilReport(
        p=table.p,
        degree=d,
        max_modulus=max_mod,
        margin=margin,
        violated=margin < -table.error_bound,
    )


def distribution_for_prime(f: PolyExact, p: int) -> ValueDist:
    """Value distribution of f mod p for any prime, including 2.

    Bypasses the odd-prime polynomial layer so that sweeps can cover even
    squarefree moduli; raises when p divides a coefficient denominator.
    """
    coeffs = []
    for c in f.coeffs:
        if c.denominator % p == 0:
            raise ValueError(f"p={p} divides a coefficient denominator")
        coeffs.append(c.numerator * pow(c.denominator, -1, p) % p)
    if not coeffs:
        coeffs = [0]
    x = np.arange(p, dtype=np.int64)
    acc = np.zeros(p, dtype=np.int64)
    for c in reversed(coeffs):
        acc = (acc * x + c) % p
    return ValueDist(p, np.bincount(acc, minlength=p))


def table_for_prime(
    f: PolyExact, p: int, cap: int = DEFAULT_PRIME_CAP
) -> SumTable:
    """Plain table of W(a;p) for any prime p (2 included)."""
    if p > cap:
        raise PrimeTooLarge(f"p={p} exceeds the table cap {cap}")
    return table_from_distribution(distribution_for_prime(f, p), f.poly_id())


def tables_for_primes(
    f: PolyExact,
    primes: Sequence[int],
    cap: int = DEFAULT_PRIME_CAP,
) -> dict[int, SumTable]:
    """Plain tables for every listed prime.

    Primes where the reduction degenerates (constant phase) still get the
    correct table: every x maps to one value, so W(a;p) = sqrt(p) e(a c0/p).
    """
    return {p: table_for_prime(f, p, cap=cap) for p in primes}
