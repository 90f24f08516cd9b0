"""Genericity classification of phase polynomials.

A polynomial f of degree d is Morse when f is squarefree, f' is squarefree
of degree d-1, and the d-1 critical values (values of f at the zeros of f')
are pairwise distinct.  On top of Morse, the classifier decides:

  * Sidon: do the critical values form a Sidon set (a+b = c+d only with
    a in {c,d})?
  * symmetric: is f linearly equivalent to an odd polynomial g whose
    critical values form a symmetric Sidon set (the relaxed quadruple test
    also allowing b = alpha - a for the symmetry center alpha)?
  * indecomposable: is f = g(h(X)) impossible with deg g, deg h >= 2?
  * Dickson-equivalent: is f linearly equivalent over Q to D_d(X, a)?

Morse-ness over Q is decided exactly through discriminants.  Sidon-type
verdicts over the algebraic closure of Q are certified one-sidedly through
a single good-prime specialization: an additive coincidence among critical
values survives reduction mod a good prime, so "Sidon mod one good p"
lifts, while failure at every tested prime is reported as unknown rather
than asserted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .errors import (
    BadCharacteristic,
    DuplicateValues,
    NoGoodPrime,
    SmallPrime,
)
from .field_poly import (
    ExtFieldElem,
    PolyExact,
    PolyModP,
    PrimeFieldElem,
    critical_value_poly,
    critical_value_poly_mod_p,
    dickson,
    discriminant,
    is_squarefree,
    reduce_mod_p,
    splitting_roots,
)
from .field_poly.polyexact import CanonicalForm, depress_and_normalize

DEFAULT_CERTIFICATE_PRIMES = (
    101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163,
)


@dataclass(frozen=True)
class CriticalData:
    """Critical values of a Morse polynomial mod p, with their shift.

    values live in a common extension of F_p; their sum is always
    F_p-rational, and the critical shift c is the unique constant making
    the critical values of f + c sum to zero.
    """

    values: tuple[ExtFieldElem, ...]
    value_sum: PrimeFieldElem
    shift: PrimeFieldElem


@dataclass
class GenericityReport:
    """Full classification verdict for one polynomial."""

    poly: PolyExact
    morse: bool
    sidon: Optional[bool]              # True or None ("unknown"), never False
    sidon_evidence: str
    symmetric_sidon_morse: bool
    odd_witness: Optional[tuple[Fraction, Fraction, PolyExact]]
    indecomposable: bool
    decomposition: Optional[tuple[PolyExact, PolyExact]]
    dickson_param: Optional[Fraction]
    verdict: str                       # NotMorse | MorseOnly | SidonMorse | SymmetricSidonMorse
    certificates: list[tuple[int, str]] = field(default_factory=list)

    @property
    def definite(self) -> bool:
        return self.verdict != "MorseOnly" or self.sidon is not None

    def to_jsonable(self) -> dict:
        out = {
            "poly": [_frac_str(c) for c in self.poly.coeffs],
            "morse": self.morse,
            "sidon": self.sidon if self.sidon is not None else "unknown",
            "sidon_evidence": self.sidon_evidence,
            "symmetric": self.symmetric_sidon_morse,
            "indecomposable": self.indecomposable,
            "dickson_param": (
                _frac_str(self.dickson_param)
                if self.dickson_param is not None
                else None
            ),
            "verdict": self.verdict,
            "certificates": [[p, v] for p, v in self.certificates],
        }
        if self.odd_witness is not None:
            x0, delta, g = self.odd_witness
            out["odd_witness"] = {
                "x0": _frac_str(x0),
                "delta": _frac_str(delta),
                "g": [_frac_str(c) for c in g.coeffs],
            }
        else:
            out["odd_witness"] = None
        if self.decomposition is not None:
            g, h = self.decomposition
            out["decomposition"] = {
                "outer": [_frac_str(c) for c in g.coeffs],
                "inner": [_frac_str(c) for c in h.coeffs],
            }
        else:
            out["decomposition"] = None
        return out


def _frac_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def is_morse(f: PolyModP) -> bool:
    """Morse over F_p: f squarefree, f' squarefree of full degree, CV_f squarefree.

    Requires p > 2d - 1; smaller primes are rejected outright.
    """
    d = f.degree
    if d < 1:
        raise ValueError("need deg f >= 1")
    if f.p <= 2 * d - 1:
        raise SmallPrime(f"need p > 2d-1 = {2 * d - 1}, got {f.p}")
    if d == 1:
        return True
    fp = f.derivative()
    if fp.degree != d - 1 or not is_squarefree(f) or (
        d >= 3 and not is_squarefree(fp)
    ):
        return False
    cv = critical_value_poly_mod_p(f)
    return cv.degree == 1 or is_squarefree(cv)


def critical_data(
    f: PolyModP, seed: int = 0, extension_cap: Optional[int] = None
) -> CriticalData:
    """Critical values, their sum S, and the shift c = -S/(d-1) mod p."""
    d = f.degree
    p = f.p
    if (d - 1) % p == 0:
        raise BadCharacteristic(f"p = {p} divides d-1 = {d - 1}")
    if not is_morse(f):
        raise ValueError("critical_data requires a Morse polynomial")
    cv = critical_value_poly_mod_p(f)
    if extension_cap is None:
        values = splitting_roots(cv, seed=seed)
    else:
        values = splitting_roots(cv, cap=extension_cap, seed=seed)
    total = values[0]
    for v in values[1:]:
        total = total + v
    value_sum = PrimeFieldElem(total.to_int(), p)
    # Vieta cross-check: sum of roots of monic CV equals -coeff_{d-2}.
    assert value_sum.value == (-cv.coeff(d - 2)) % p
    shift = PrimeFieldElem(
        -value_sum.value * pow(d - 1, -1, p), p
    )
    return CriticalData(tuple(values), value_sum, shift)


def is_sidon(values: Sequence[ExtFieldElem]) -> bool:
    """Exhaustive quadruple test: a+b = c+d forces a in {c, d}."""
    _check_distinct(values)
    vals = list(values)
    for a in vals:
        for b in vals:
            s = a + b
            for c in vals:
                for d in vals:
                    if (c + d).coeffs == s.coeffs and a.coeffs not in (
                        c.coeffs,
                        d.coeffs,
                    ):
                        return False
    return True


def is_symmetric_sidon(
    values: Sequence[ExtFieldElem],
) -> Optional[ExtFieldElem]:
    """Symmetry center alpha if the set is symmetric Sidon, else None.

    Summing S = alpha - S forces alpha = 2*sum/|S|, so only one candidate
    exists; the quadruple test is relaxed to also accept b = alpha - a.
    """
    _check_distinct(values)
    vals = list(values)
    r = len(vals)
    p = vals[0].field.p
    if r % p == 0:
        return None  # cannot divide by |S|
    total = vals[0]
    for v in vals[1:]:
        total = total + v
    alpha = total.scale(2 * pow(r, -1, p) % p)
    cset = {v.coeffs for v in vals}
    if {(alpha - v).coeffs for v in vals} != cset:
        return None
    for a in vals:
        for b in vals:
            s = a + b
            reflected = (alpha - a).coeffs
            for c in vals:
                for d in vals:
                    if (c + d).coeffs != s.coeffs:
                        continue
                    if a.coeffs in (c.coeffs, d.coeffs):
                        continue
                    if b.coeffs == reflected:
                        continue
                    return None
    return alpha


def _check_distinct(values: Sequence[ExtFieldElem]) -> None:
    if not values:
        raise DuplicateValues("empty value set")
    if len({v.coeffs for v in values}) != len(values):
        raise DuplicateValues("values must be pairwise distinct")


def odd_form(
    f: PolyExact,
) -> Optional[tuple[Fraction, Fraction, PolyExact]]:
    """(x0, delta, g) with f(x0 + t) = g(t) + delta and g odd, if possible.

    The center is forced: killing the t^(d-1) coefficient of f(x0+t) has
    the single solution x0 = -c_{d-1}/(d lc), and delta = f(x0) is then
    pinned by the vanishing constant term.  Absence is therefore a proof
    that no witness exists.
    """
    d = f.degree
    if d < 3:
        raise ValueError("need deg f >= 3")
    if d % 2 == 0:
        return None  # even leading term can never be odd
    x0 = -f.coeff(d - 1) / (d * f.lead)
    delta = f(x0)
    g = f.shift_arg(x0) - PolyExact((delta,))
    if any(g.coeff(i) != 0 for i in range(0, d + 1, 2)):
        return None
    return (x0, delta, g)


def decompose(f: PolyExact) -> Optional[tuple[PolyExact, PolyExact]]:
    """A functional decomposition f = g(h(X)) with both degrees >= 2, or None.

    For each divisor e of d with 1 < e < d the inner candidate h (monic,
    h(0) = 0) is pinned by the top e coefficients of f via the truncated
    k-th root at infinity (k = d/e); f is then expanded in base h by
    repeated division and the decomposition is accepted exactly when all
    remainders are constants.
    """
    d = f.degree
    if d < 2:
        raise ValueError("need deg f >= 2")
    for e in range(2, d):
        if d % e != 0:
            continue
        k = d // e
        h = _inner_candidate(f, e, k)
        g = _expand_in_base(f, h)
        if g is not None:
            assert g.compose(h) == f
            return (g, h)
    return None


def is_indecomposable(f: PolyExact) -> bool:
    """True iff no decomposition exists (prime degree short-circuits)."""
    d = f.degree
    if d < 2:
        raise ValueError("need deg f >= 2")
    if _is_prime_small(d):
        return True
    return decompose(f) is None


def _is_prime_small(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def _inner_candidate(f: PolyExact, e: int, k: int) -> PolyExact:
    """Monic degree-e h with h(0)=0 matching f's top coefficients as h^k."""
    d = f.degree
    target = f.scale(1 / f.lead)
    coeffs = [Fraction(0)] * e + [Fraction(1)]  # X^e
    for j in range(1, e):
        h = PolyExact(tuple(coeffs))
        power = h
        for _ in range(k - 1):
            power = power * h
        # coefficient of X^(d-j) depends linearly on coeffs[e-j] with slope k
        gap = target.coeff(d - j) - power.coeff(d - j)
        coeffs[e - j] = gap / k
    return PolyExact(tuple(coeffs))


def _expand_in_base(f: PolyExact, h: PolyExact) -> Optional[PolyExact]:
    """g with f = sum g_i h^i if every base-h remainder is constant."""
    rems = []
    cur = f
    while not cur.is_zero:
        cur, r = cur.divmod(h)
        if r.degree > 0:
            return None
        rems.append(r.coeff(0))
    return PolyExact(tuple(rems))


@dataclass(frozen=True)
class AffineMap:
    """g = a * f(c X + e) + b with a, c nonzero."""

    a: Fraction
    b: Fraction
    c: Fraction
    e: Fraction

    def apply(self, f: PolyExact) -> PolyExact:
        return f.compose(
            PolyExact((self.e, self.c))
        ).scale(self.a) + PolyExact((self.b,))

    def invert(self) -> "AffineMap":
        # g = a f(cX+e)+b  =>  f = (1/a) g((X-e)/c) - b/a
        return AffineMap(1 / self.a, -self.b / self.a, 1 / self.c, -self.e / self.c)

    def compose_with(self, other: "AffineMap") -> "AffineMap":
        """Witness for f ~ h given other: f ~ g and self: g ~ h."""
        return AffineMap(
            self.a * other.a,
            self.a * other.b + self.b,
            other.c * self.c,
            other.c * self.e + other.e,
        )


@dataclass(frozen=True)
class EquivalenceWitness:
    """Outcome of a linear-equivalence test.

    rational is False when equivalence holds over the algebraic closure but
    no witness with rational scaling c exists; map is then None.
    """

    rational: bool
    map: Optional[AffineMap]


def linear_equivalent(
    f: PolyExact, g: PolyExact, over: str = "rational"
) -> Optional[EquivalenceWitness]:
    """Witness for g = a f(cX+e) + b over Q or over the algebraic closure.

    Both are canonicalized to monic, depressed, constant-free form, where
    equivalence reduces to a scalar c with g~_j = c^(j-d) f~_j on the
    common support.  Over the closure only cross-consistency of the
    coefficient ratios matters; over Q a rational c must solve the system,
    and the reconstructed affine map is verified by exact expansion.
    """
    if over not in ("rational", "algebraic_closure"):
        raise ValueError(f"unknown field selector {over!r}")
    d = f.degree
    if d != g.degree or d < 2:
        return None
    ff = depress_and_normalize(f)
    gg = depress_and_normalize(g)
    support = [j for j in range(d) if ff.poly.coeff(j) != 0]
    if support != [j for j in range(d) if gg.poly.coeff(j) != 0]:
        return None
    if not support:
        # both canonical forms are X^d; c = 1 works
        return EquivalenceWitness(True, _reconstruct(f, g, ff, gg, Fraction(1)))
    ratios = {j: ff.poly.coeff(j) / gg.poly.coeff(j) for j in support}
    # cross-consistency: (r_j)^(d-j') = (r_j')^(d-j) for all pairs
    for j in support:
        for jp in support:
            if ratios[j] ** (d - jp) != ratios[jp] ** (d - j):
                return None
    c = _rational_scaling(ratios, d)
    if c is not None:
        witness = _reconstruct(f, g, ff, gg, c)
        assert witness.apply(f) == g
        return EquivalenceWitness(True, witness)
    if over == "algebraic_closure":
        return EquivalenceWitness(False, None)
    return None


def _rational_scaling(ratios: dict[int, Fraction], d: int) -> Optional[Fraction]:
    """Rational c with c^(d-j) = ratios[j] for all j, if one exists."""
    exps = sorted(d - j for j in ratios)
    g = 0
    for ex in exps:
        g = _gcd(g, ex)
    # Bezout combination: c^g as a product of known powers of c.
    c_g = _bezout_power(ratios, d, g)
    if c_g is None:
        return None
    for c in _rational_roots(c_g, g):
        if all(c ** (d - j) == r for j, r in ratios.items()):
            return c
    return None


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def _bezout_power(
    ratios: dict[int, Fraction], d: int, g: int
) -> Optional[Fraction]:
    """Value of c^g from the ratio system via an integer Bezout relation."""
    exps = [d - j for j in ratios]
    coefs = _bezout_vector(exps, g)
    if coefs is None:
        return None
    val = Fraction(1)
    for (j, r), lam in zip(ratios.items(), coefs):
        val *= r**lam
    return val


def _bezout_vector(exps: list[int], g: int) -> Optional[list[int]]:
    """Integers lam_i with sum lam_i exps_i = g."""
    # incremental extended gcd across the list
    lams = [0] * len(exps)
    cur_g = 0
    cur_comb = [0] * len(exps)
    for i, e in enumerate(exps):
        gg, x, y = _ext_gcd(cur_g, e)
        cur_comb = [c * x for c in cur_comb]
        cur_comb[i] = y
        cur_g = gg
    if cur_g != g:
        return None
    return cur_comb


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    if a == 0:
        return (b, 0, 1)
    g, x, y = _ext_gcd(b % a, a)
    return (g, y - (b // a) * x, x)


def _rational_roots(val: Fraction, g: int) -> list[Fraction]:
    """All rational g-th roots of val (zero, one or two candidates)."""
    if g == 1:
        return [val]
    if val == 0:
        return [Fraction(0)]
    if val < 0 and g % 2 == 0:
        return []
    sign = -1 if val < 0 else 1
    num = _int_root(abs(val.numerator), g)
    den = _int_root(abs(val.denominator), g)
    if num is None or den is None:
        return []
    root = Fraction(sign * num, den) if g % 2 else Fraction(num, den)
    out = [root]
    if g % 2 == 0:
        out.append(-root)
    return out


def _int_root(n: int, g: int) -> Optional[int]:
    if n == 0:
        return 0
    r = round(n ** (1.0 / g))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand**g == n:
            return cand
    return None


def _reconstruct(
    f: PolyExact,
    g: PolyExact,
    ff: CanonicalForm,
    gg: CanonicalForm,
    c: Fraction,
) -> AffineMap:
    """Assemble g = a f(cX + e) + b from the two canonicalization records."""
    d = f.degree
    a = ff.a * c**(-d) / gg.a
    e = ff.e - c * gg.e
    b = (c**(-d) * ff.b - gg.b) / gg.a
    # scaling: g(X + e_g) = (c^-d f~(cX) - b_g)/a_g with f~ = a_f f(X+e_f)+b_f
    return AffineMap(a, b, c, e)


def dickson_equivalent(f: PolyExact) -> Optional[Fraction]:
    """Parameter a with f linearly equivalent over Q to D_d(X, a), or None.

    The canonical form of D_d(X, a) has X^(d-2) coefficient -d*a, and the
    scaling identity D_d(cX, a) = c^d D_d(X, a/c^2) keeps the family closed
    under canonicalization, so the candidate parameter can be read off one
    coefficient instead of searched.
    """
    d = f.degree
    if d < 3:
        raise ValueError("need deg f >= 3")
    form = depress_and_normalize(f)
    a0 = -form.poly.coeff(d - 2) / d
    target = dickson(d, a0)
    witness = linear_equivalent(f, target, over="rational")
    if witness is not None and witness.rational:
        return a0
    return None


def fried_predict(f: PolyExact) -> str:
    """Absolute irreducibility of (f(X)-f(Y))/(X-Y), predicted from f alone.

    Composite or even degree: equivalent to indecomposability.  Degree 3:
    equivalent to not being linearly equivalent over Q to X^3.  Odd prime
    degree >= 5: non-Dickson suffices, Dickson-equivalent stays undecided.
    """
    d = f.degree
    if d < 2:
        raise ValueError("need deg f >= 2")
    if d == 3:
        eq = linear_equivalent(f, PolyExact.x_power(3), over="rational")
        return "Reducible" if eq is not None else "AbsolutelyIrreducible"
    if _is_prime_small(d) and d % 2 == 1:
        if dickson_equivalent(f) is None:
            return "AbsolutelyIrreducible"
        return "Undetermined"
    return (
        "AbsolutelyIrreducible" if is_indecomposable(f) else "Reducible"
    )


def is_good_prime(f: PolyExact, p: int) -> bool:
    """Screening for certificate primes: reduction preserves the Morse data.

    Rejects p <= 2d-1, p | d-1 and p dividing the leading coefficient or
    any of disc(f), disc(f'), disc(CV_f) (computed exactly over Q).
    """
    d = f.degree
    if d < 2 or p <= 2 * d - 1 or (d - 1) % p == 0:
        return False
    if any(c.denominator % p == 0 for c in f.coeffs):
        return False
    if f.lead.numerator % p == 0:
        return False
    for poly in (f, f.derivative()):
        disc = discriminant(poly)
        if disc == 0 or disc.numerator % p == 0 or disc.denominator % p == 0:
            return False
    cv = critical_value_poly(f)
    if cv.degree >= 2:
        disc = discriminant(cv)
        if disc == 0 or disc.numerator % p == 0 or disc.denominator % p == 0:
            return False
    return True


def good_primes(f: PolyExact, candidates: Sequence[int]) -> list[int]:
    return [p for p in candidates if is_good_prime(f, p)]


def classify(
    f: PolyExact,
    certificate_primes: Sequence[int] = DEFAULT_CERTIFICATE_PRIMES,
    seed: int = 0,
    extension_cap: Optional[int] = None,
) -> GenericityReport:
    """Classify f over Q, certifying Sidon-type claims at good primes."""
    d = f.degree
    if d < 2:
        raise ValueError("need deg f >= 2")

    decomposition = decompose(f) if not _is_prime_small(d) else None
    indecomposable = decomposition is None
    witness = odd_form(f) if d >= 3 else None
    dickson_param = dickson_equivalent(f) if d >= 3 else None

    morse = (
        discriminant(f) != 0
        and (d < 3 or discriminant(f.derivative()) != 0)
        and (d < 3 or discriminant(critical_value_poly(f)) != 0)
    )
    if not morse:
        return GenericityReport(
            poly=f,
            morse=False,
            sidon=None,
            sidon_evidence="not applicable (not Morse)",
            symmetric_sidon_morse=False,
            odd_witness=witness,
            indecomposable=indecomposable,
            decomposition=decomposition,
            dickson_param=dickson_param,
            verdict="NotMorse",
        )

    primes = good_primes(f, certificate_primes)
    if not primes:
        raise NoGoodPrime(
            f"no good certificate prime for {f!r} among {list(certificate_primes)}"
        )

    certificates: list[tuple[int, str]] = []
    sidon: Optional[bool] = None
    failures = 0
    for p in primes:
        fp = reduce_mod_p(f, p).poly
        data = critical_data(fp, seed=seed, extension_cap=extension_cap)
        if is_sidon(data.values):
            sidon = True
            certificates.append((p, "sidon"))
            break
        failures += 1
        certificates.append((p, "not-sidon-mod-p"))
    evidence = (
        f"certified at p={certificates[-1][0]}"
        if sidon
        else f"unknown (fails at {failures} primes)"
    )

    symmetric = False
    if witness is not None:
        _, _, g = witness
        for p in good_primes(g, certificate_primes):
            gp = reduce_mod_p(g, p).poly
            data = critical_data(gp, seed=seed, extension_cap=extension_cap)
            if is_symmetric_sidon(data.values) is not None:
                symmetric = True
                certificates.append((p, "symmetric-sidon"))
                break
            certificates.append((p, "not-symmetric-sidon-mod-p"))

    if symmetric:
        verdict = "SymmetricSidonMorse"
    elif sidon:
        verdict = "SidonMorse"
    else:
        verdict = "MorseOnly"
    certificates.sort(key=lambda cv: cv[0])
    return GenericityReport(
        poly=f,
        morse=True,
        sidon=sidon,
        sidon_evidence=evidence,
        symmetric_sidon_morse=symmetric,
        odd_witness=witness,
        indecomposable=indecomposable,
        decomposition=decomposition,
        dickson_param=dickson_param,
        verdict=verdict,
        certificates=certificates,
    )
