"""Moment statistics of the sum tables, with independent counting oracles.

The k-th absolute moment at a prime is
M_k(p) = (1/p) sum over a in F_p* of |W(a;p)|^(2k).  Two integer-counting
oracles anchor the DFT path:

  second moment   counts points on the curve (f(X)-f(Y))/(X-Y) = 0 column
                  by column, each column's roots found through
                  gcd(Y^p - Y, .); completely independent of the tables.
  fourth moment   counts solutions of f(x)+f(y) = f(z)+f(w) through the
                  cyclic self-convolution of the value distribution.

Prime-averaged sums S(x) = sum_{p<=x} M_1(p)/p grow like
(kappa-1) log log x where kappa is the number of irreducible factors of
f(X)-f(Y) over Q; kappa is estimated by averaging rounded per-prime
component counts (the mean number of components defined over F_p equals
the number of rational factors, and the max equals the number of absolute
factors).  Sweeps over squarefree moduli accumulate |W(a;q)|^j via the
twisted product, one prime at a time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .cache import TableCache
from .charsums import (
    DEFAULT_PRIME_CAP,
    SumTable,
    ValueDist,
    distribution_for_prime,
    table_for_prime,
    table_from_distribution,
    value_distribution,
)
from .errors import CapExceeded, InsufficientSamples, SmallPrime
from .field_poly import PolyExact, PolyModP, reduce_mod_p
from .genericity import classify

DEFAULT_SWEEP_CAP = 30_000
DEFAULT_GRID = (1_000, 3_000, 10_000, 30_000)
DEFAULT_DICHOTOMY_T = 10.0


def primes_up_to(x: int) -> list[int]:
    """Primes <= x by a numpy sieve of Eratosthenes."""
    if x < 2:
        return []
    sieve = np.ones(x + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(x**0.5) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return [int(p) for p in np.nonzero(sieve)[0]]


def admissible_primes(f: PolyExact, x: int, minimum: int = 3) -> list[int]:
    """Primes p <= x where reduction keeps full degree and denominators clear."""
    d = f.degree
    out = []
    for p in primes_up_to(x):
        if p < minimum or p <= d:
            continue
        if any(c.denominator % p == 0 for c in f.coeffs):
            continue
        if f.lead.numerator % p == 0:
            continue
        out.append(p)
    return out


def prime_moment(table: SumTable, exponent: int) -> float:
    """(1/p) sum over a != 0 of |W(a;p)|^exponent (exponent 1 or even)."""
    if exponent != 1 and (exponent < 2 or exponent % 2 != 0):
        raise ValueError("exponent must be 1 or a positive even integer")
    mags = np.abs(table.masked())
    return float((mags**exponent).sum() / table.p)


# ---------------------------------------------------------------------------
# Counting oracles.  These deliberately avoid the DFT machinery.

def _column_poly(coeffs: Sequence[int], x: int, p: int) -> list[int]:
    """(f(Y) - f(x)) / (Y - x) by synthetic division, constant term first."""
    d = len(coeffs) - 1
    b = [0] * d
    b[d - 1] = coeffs[d]
    for k in range(d - 1, 0, -1):
        b[k - 1] = (coeffs[k] + x * b[k]) % p
    return b


def _count_roots(q: list[int], p: int) -> int:
    """Distinct roots of q in F_p via deg gcd(Y^p - Y, q); q nonconstant."""
    # trim
    dq = len(q) - 1
    while dq >= 0 and q[dq] == 0:
        dq -= 1
    if dq <= 0:
        return 0
    q = q[: dq + 1]
    # Y^p mod q by square-and-multiply on raw lists
    result = [1]
    acc = [0, 1] if dq > 1 else [(-q[0]) * pow(q[1], -1, p) % p]
    n = p
    while n:
        if n & 1:
            result = _polymulmod(result, acc, q, p)
        n >>= 1
        if n:
            acc = _polymulmod(acc, acc, q, p)
    # gcd(result - Y, q)
    diff = list(result) + [0] * (2 - len(result))
    diff[1] = (diff[1] - 1) % p
    return len(_raw_gcd(diff, q, p)) - 1


def _polymulmod(a: list[int], b: list[int], mod: list[int], p: int) -> list[int]:
    dm = len(mod) - 1
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    # reduce
    inv = pow(mod[dm], -1, p)
    for i in range(len(out) - 1, dm - 1, -1):
        c = out[i]
        if c:
            factor = c * inv % p
            out[i] = 0
            for j in range(dm):
                out[i - dm + j] = (out[i - dm + j] - factor * mod[j]) % p
    while len(out) > 1 and out and out[-1] == 0:
        out.pop()
    return out or [0]


def _raw_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    def trim(v):
        n = len(v)
        while n > 0 and v[n - 1] == 0:
            n -= 1
        return v[:n]

    a, b = trim(a), trim(b)
    while b:
        # remainder of a mod b
        r = list(a)
        db = len(b) - 1
        inv = pow(b[-1], -1, p)
        for i in range(len(r) - 1, db - 1, -1):
            c = r[i]
            if c:
                factor = c * inv % p
                r[i] = 0
                for j in range(db):
                    r[i - db + j] = (r[i - db + j] - factor * b[j]) % p
        a, b = b, trim(r)
    return a


def second_moment_oracle(f: PolyModP) -> float:
    """M_1(p) by pure point counting, independent of any DFT.

    Counts the zeros of (f(X)-f(Y))/(X-Y) column by column and subtracts
    the distinct zeros of f' (the diagonal), then divides by p; by
    orthogonality of additive characters this equals
    (1/p) sum over a != 0 of |W(a;p)|^2 exactly.
    """
    p, d = f.p, f.degree
    if p <= d:
        raise SmallPrime(f"need p > deg f ({p} <= {d})")
    coeffs = list(f.coeffs)
    if d == 1:
        return 0.0  # linear phase: every W(a != 0; p) vanishes
    curve_points = 0
    for x in range(p):
        col = _column_poly(coeffs, x, p)
        curve_points += _count_roots(col, p)
    fp = f.derivative()
    diag = _count_roots(list(fp.coeffs), p) if fp.degree >= 1 else 0
    return (curve_points - diag) / p


def fourth_moment_oracle(dist: ValueDist) -> float:
    """M_2(p) from the count N4 = #{f(x)+f(y) = f(z)+f(w)}.

    N4 = sum_s r(s)^2 with r the cyclic self-convolution of the value
    distribution; the convolution is done with the same length-p transform
    the tables use, then rounded back to exact integers.  Returns
    N4/p^2 - p, the a = 0 term removed by orthogonality.
    """
    p = dist.p
    counts = dist.counts.astype(np.float64)
    spectrum = np.fft.fft(counts)
    conv = np.fft.ifft(spectrum * spectrum).real
    r = np.rint(conv)
    if np.abs(conv - r).max() > 1e-3:
        raise ArithmeticError("convolution failed to round to integers")
    r = r.astype(np.int64)
    if p <= 200_000:
        n4 = int(np.dot(r, r))
    else:
        n4 = sum(int(v) * int(v) for v in r)
    return n4 / p**2 - p


# ---------------------------------------------------------------------------
# Per-prime reports and scans.

@dataclass
class MomentRow:
    p: int
    moments: dict[int, float]              # exponent -> M
    oracles: dict[int, float] = field(default_factory=dict)
    references: dict[int, float] = field(default_factory=dict)
    reference_exact: dict[int, bool] = field(default_factory=dict)
    discrepancy_sqrtp: Optional[float] = None
    flag: str = ""


def moment_row(
    f: PolyExact,
    p: int,
    exponents: Sequence[int],
    references: Optional[dict[int, tuple[float, bool]]] = None,
    with_oracles: bool = True,
    cap: int = DEFAULT_PRIME_CAP,
) -> MomentRow:
    """All requested moments at one prime, with oracle cross-checks."""
    fp = reduce_mod_p(f, p).poly
    if fp.degree < 1:
        return MomentRow(p=p, moments={}, flag="degenerate-reduction")
    dist = value_distribution(fp)
    table = table_from_distribution(dist, poly_id=f.poly_id())
    row = MomentRow(p=p, moments={})
    for e in exponents:
        row.moments[e] = prime_moment(table, e)
    if with_oracles:
        if 2 in exponents and p <= 5000:
            try:
                row.oracles[2] = second_moment_oracle(fp)
            except SmallPrime:
                row.flag = "small-prime"
        if 4 in exponents:
            row.oracles[4] = fourth_moment_oracle(dist)
    if references:
        disc = 0.0
        for e, (ref, exact) in references.items():
            if e in row.moments:
                row.references[e] = ref
                row.reference_exact[e] = exact
                if exact:
                    disc = max(disc, abs(row.moments[e] - ref))
        row.discrepancy_sqrtp = disc * math.sqrt(p)
    return row


@dataclass
class DichotomyRow:
    p: int
    m2: float
    near_two: bool
    high: bool


@dataclass
class DichotomyReport:
    rows: list[DichotomyRow]
    fraction_high: float
    verdict: str  # Case1 | Case2 | Mixed/Inconclusive
    threshold: float
    warning: str = ""


def dichotomy_scan(
    f: PolyExact,
    primes: Sequence[int],
    threshold: float = DEFAULT_DICHOTOMY_T,
    case2_min_fraction: float = 0.25,
) -> DichotomyReport:
    """Flag each prime's fourth moment as near 2 or high (>= 3 - T/sqrt p).

    Case1 when every prime is near 2; Case2 when a positive fraction
    (default a quarter) of the primes is high; otherwise mixed.
    """
    rows = []
    for p in primes:
        fp = reduce_mod_p(f, p).poly
        if fp.degree < 1:
            continue
        m2 = fourth_moment_oracle(value_distribution(fp))
        tol = threshold / math.sqrt(p)
        rows.append(
            DichotomyRow(
                p=p,
                m2=m2,
                near_two=abs(m2 - 2.0) <= tol,
                high=m2 >= 3.0 - tol,
            )
        )
    if not rows:
        return DichotomyReport([], 0.0, "Mixed/Inconclusive", threshold,
                               warning="no usable primes")
    frac_high = sum(r.high for r in rows) / len(rows)
    warning = ""
    if all(r.m2 < 0.5 for r in rows):
        warning = "all moments near zero; degenerate phase"
    if all(r.near_two for r in rows):
        verdict = "Case1"
    elif frac_high >= case2_min_fraction:
        verdict = "Case2"
    else:
        verdict = "Mixed/Inconclusive"
    return DichotomyReport(rows, frac_high, verdict, threshold, warning)


@dataclass
class KappaEstimate:
    kappa: int
    m: int
    confidence: float       # max |oracle - nearest integer| over samples
    mean_residual: float    # |mean of rounded values - (kappa - 1)|
    samples: int


def estimate_kappa(
    f: PolyExact, sample_primes: Sequence[int]
) -> KappaEstimate:
    """kappa (rational factor count of f(X)-f(Y), X-Y included) and m.

    Averages the rounded per-prime component counts: the mean over primes
    equals the number of rational factors of (f(X)-f(Y))/(X-Y) and the max
    equals the number of absolutely irreducible factors, both attained on
    the sampled primes up to O(p^-1/2) noise.
    """
    usable = [
        p
        for p in sample_primes
        if p > f.degree
        and all(c.denominator % p for c in f.coeffs)
        and f.lead.numerator % p != 0
    ]
    if len(usable) < 20:
        raise InsufficientSamples(
            f"need >= 20 good sample primes, have {len(usable)}"
        )
    rounded = []
    residual = 0.0
    for p in usable:
        fp = reduce_mod_p(f, p).poly
        val = second_moment_oracle(fp)
        r = round(val)
        residual = max(residual, abs(val - r))
        rounded.append(r)
    mean = sum(rounded) / len(rounded)
    kappa = round(mean) + 1
    return KappaEstimate(
        kappa=kappa,
        m=max(rounded),
        confidence=residual,
        mean_residual=abs(mean - (kappa - 1)),
        samples=len(usable),
    )


@dataclass
class ShaoPoint:
    x: int
    partial_sum: float       # S(x) = sum_{p <= x, admissible} M_1(p)/p
    kappa: int
    drift: float             # S(x) - (kappa - 1) log log x
    low_confidence: bool


def shao_partial_sum(
    f: PolyExact,
    x: int,
    kappa: Optional[int] = None,
    kappa_sample: Optional[Sequence[int]] = None,
) -> ShaoPoint:
    """S(x) with its drift against (kappa - 1) log log x.

    M_1(p) is evaluated through the exact power-sum identity
    M_1(p) = (sum_v N[v]^2)/p - 1, which equals the table moment by
    Parseval but costs one Horner pass per prime.
    """
    if x < 100:
        raise ValueError("need x >= 100")
    if kappa is None:
        sample = kappa_sample or [
            p for p in admissible_primes(f, 2000) if p > 50
        ][:40]
        kappa = estimate_kappa(f, sample).kappa
    s = 0.0
    for p in admissible_primes(f, x):
        fp = reduce_mod_p(f, p).poly
        dist = value_distribution(fp)
        m1 = dist.second_power_sum / p - 1.0
        s += m1 / p
    loglog = math.log(math.log(x))
    return ShaoPoint(
        x=x,
        partial_sum=s,
        kappa=kappa,
        drift=s - (kappa - 1) * loglog,
        low_confidence=x <= 100,
    )


def cross_moment(
    fs: Sequence[PolyExact], p: int, k: int, cap: int = DEFAULT_PRIME_CAP
) -> float:
    """(1/p) sum over a != 0 of |prod_i W_{f_i}(a;p)|^(2k), k in {1, 2}."""
    if k not in (1, 2):
        raise ValueError("k must be 1 or 2")
    prod = np.ones(p, dtype=np.complex128)
    for f in fs:
        table = table_for_prime(f, p, cap=cap)
        prod *= table.masked()
    mags = np.abs(prod)
    return float((mags ** (2 * k)).sum() / p)


# ---------------------------------------------------------------------------
# Sweeps over squarefree moduli.

@dataclass
class SweepReport:
    poly_ids: list[str]
    a: int
    grid: list[int]
    sums: dict[int, list[float]]        # j -> per-grid-x sums of |W|^j
    counts: list[int]                   # squarefree moduli <= grid x
    ratios: dict[int, list[float]]      # j -> normalized ratios
    fourth_ratio_lower: list[float]     # S4 log x / x, the other normalization
    log_exponent_a: float               # A used for the j = 2 ratio
    fourth_exponent: float              # 2^(m-s) 3^s - 1 used for j = 4
    gamma_hat: float                    # fitted decay exponent for j = 1
    s: int                              # symmetric factors of odd degree >= 5
    envelope: dict[int, list[float]]    # j -> envelope bound per grid x


def sweep_q(
    fs: Sequence[PolyExact],
    a: int,
    x: int,
    j: int = 2,
    grid: Optional[Sequence[int]] = None,
    cache: Optional[TableCache] = None,
    cap: int = DEFAULT_SWEEP_CAP,
) -> SweepReport:
    """Accumulate sum over squarefree q <= x of |W_1 ... W_m(a;q)|^j.

    One pass per prime: the masked table value at a * inv(q/p) mod p is
    multiplied into every squarefree multiple q of p, so memory stays at
    one table plus one length-x accumulator regardless of x.  All three
    powers j in {1, 2, 4} are accumulated; the requested j selects the
    headline ratio column.
    """
    if j not in (1, 2, 4):
        raise ValueError("j must be 1, 2 or 4")
    if a < 1:
        raise ValueError("a must be >= 1")
    if x > cap:
        raise CapExceeded(f"sweep bound {x} exceeds cap {cap}")
    grid = sorted(set(g for g in (grid or DEFAULT_GRID) if g <= x) | {x})

    poly_ids = [f.poly_id() for f in fs]
    squarefree = np.ones(x + 1, dtype=bool)
    squarefree[0] = False
    primes = primes_up_to(x)
    for p in primes:
        squarefree[p * p :: p * p] = False

    w_acc = np.ones(x + 1, dtype=np.complex128)
    env_g: dict[int, dict[int, float]] = {1: {}, 2: {}, 4: {}}
    env_big_g: dict[int, dict[int, float]] = {1: {}, 2: {}, 4: {}}
    for p in primes:
        vals = np.ones(p, dtype=np.complex128)
        for f, pid in zip(fs, poly_ids):
            vals *= _prime_table(f, pid, p, cache).masked()
        mags = np.abs(vals)
        for jj in (1, 2, 4):
            env_big_g[jj][p] = float((mags**jj).max())
            env_g[jj][p] = float((mags**jj).sum() / p)
        a_mod = a % p
        inv_cache: dict[int, int] = {}
        for q in range(p, x + 1, p):
            if not squarefree[q]:
                continue
            cof = (q // p) % p
            inv = inv_cache.get(cof)
            if inv is None:
                inv = pow(cof, -1, p)
                inv_cache[cof] = inv
            w_acc[q] *= vals[a_mod * inv % p]

    mags = np.abs(w_acc)
    mags[~squarefree] = 0.0
    mags[1] = 1.0  # empty product: W(a;1) = 1

    sums: dict[int, list[float]] = {1: [], 2: [], 4: []}
    counts = []
    for gx in grid:
        window = mags[: gx + 1]
        counts.append(int(squarefree[: gx + 1].sum()))
        for jj in (1, 2, 4):
            sums[jj].append(float((window**jj).sum()))

    m = len(fs)
    s = _count_symmetric_odd_ge5(fs)
    big_a = 1.0
    for f in fs:
        big_a *= (f.degree - 1) ** 2
    fourth_exp = 2.0 ** (m - s) * 3.0**s - 1.0

    # two fourth-moment normalizations are reported (upper-bound shape
    # x (log x)^E and lower-bound shape x / log x); neither is endorsed
    ratios: dict[int, list[float]] = {1: [], 2: [], 4: []}
    fourth_lower = []
    for gx, s1, s2, s4 in zip(grid, sums[1], sums[2], sums[4]):
        loglog = math.log(math.log(gx))
        ratios[1].append(s1 / gx)
        ratios[2].append(s2 / (gx * loglog**big_a))
        ratios[4].append(s4 / (gx * math.log(gx) ** fourth_exp))
        fourth_lower.append(s4 * math.log(gx) / gx)

    gamma_hat = _fit_gamma(grid, sums[1])

    envelope: dict[int, list[float]] = {}
    for jj in (1, 2, 4):
        env = _EnvelopeSeries(env_big_g[jj], env_g[jj])
        envelope[jj] = [env.bound(gx) for gx in grid]

    return SweepReport(
        poly_ids=poly_ids,
        a=a,
        grid=list(grid),
        sums=sums,
        counts=counts,
        ratios=ratios,
        fourth_ratio_lower=fourth_lower,
        log_exponent_a=big_a,
        fourth_exponent=fourth_exp,
        gamma_hat=gamma_hat,
        s=s,
        envelope=envelope,
    )


def _prime_table(
    f: PolyExact, pid: str, p: int, cache: Optional[TableCache]
) -> SumTable:
    if cache is not None:
        dist = cache.load_dist(pid, p)
        if dist is not None:
            return table_from_distribution(dist, pid)
    dist = distribution_for_prime(f, p)
    if cache is not None:
        cache.store_dist(pid, dist)
    return table_from_distribution(dist, pid)


def _count_symmetric_odd_ge5(fs: Sequence[PolyExact]) -> int:
    s = 0
    for f in fs:
        if f.degree < 5 or f.degree % 2 == 0:
            continue
        try:
            report = classify(f)
        except Exception:
            continue
        if report.symmetric_sidon_morse:
            s += 1
    return s


def _fit_gamma(grid: Sequence[int], sums1: Sequence[float]) -> float:
    """Least-squares slope of log(S1(x)/x) against log log x (negated).

    Descriptive only; nothing downstream depends on its value.
    """
    pts = [
        (math.log(math.log(gx)), math.log(s / gx))
        for gx, s in zip(grid, sums1)
        if s > 0
    ]
    if len(pts) < 2:
        return float("nan")
    xs = np.array([u for u, _ in pts])
    ys = np.array([v for _, v in pts])
    slope = float(np.polyfit(xs, ys, 1)[0])
    return -slope


class _EnvelopeSeries:
    """Evaluates the multiplicative envelope bound cumulatively in p."""

    def __init__(self, bounds: dict[int, float], averages: dict[int, float]):
        self.primes = sorted(bounds)
        self.bounds = bounds
        self.averages = averages
        self.cap = max(bounds.values()) if bounds else 1.0

    def bound(self, x: int) -> float:
        log_prod = 0.0
        for p in self.primes:
            if p > x:
                break
            log_prod += math.log1p(self.averages[p] / p)
        return envelope_value(x, log_prod, self.cap)


def envelope_value(x: int, log_prod: float, cap: float) -> float:
    """(x / log x) * prod(1 + g(p)/p) * (log log x)^cap, implied constant 1."""
    if x < 3:
        raise ValueError("need x >= 3")
    return x / math.log(x) * math.exp(log_prod) * math.log(math.log(x)) ** cap


def envelope_bound(env, x: int) -> float:
    """Evaluate the envelope growth bound from a TwistedEnvelope."""
    log_prod = 0.0
    for p, g in sorted(env.averages.items()):
        if p <= x:
            log_prod += math.log1p(g / p)
    return envelope_value(x, log_prod, env.cap)
