"""Table construction, twisted multiplicativity, normalization, measures."""

import math
import random

import numpy as np
import pytest

from expsumlab.errors import MissingTable, NonSquarefree, NotAMeasure, PrimeTooLarge
from expsumlab.charsums import (
    TwistedEnvelope,
    direct_sum_modq,
    distribution_for_prime,
    is_squarefree_int,
    legendre_symbols,
    measure_transform,
    normalized_table,
    sum_single,
    sum_table,
    table_for_prime,
    tables_for_primes,
    twisted_extend,
    value_distribution,
    weil_check,
)
from expsumlab.field_poly import PolyExact, PolyModP, reduce_mod_p
from expsumlab.genericity import critical_data, odd_form

P = PolyExact.from_coeffs
CUBIC = P([1, 1, 0, 1])  # X^3 + X + 1


class TestValueDistribution:
    def test_linear_uniform(self):
        dist = value_distribution(PolyModP(5, (0, 1)))
        assert list(dist.counts) == [1, 1, 1, 1, 1]

    def test_squares_mod5(self):
        dist = value_distribution(PolyModP(5, (0, 0, 1)))
        assert list(dist.counts) == [1, 2, 0, 0, 2]

    def test_cubes_mod7(self):
        dist = value_distribution(PolyModP(7, (0, 0, 0, 1)))
        assert list(dist.counts) == [1, 3, 0, 0, 0, 0, 3]

    def test_mass_and_fiber_bound(self):
        rng = random.Random(6)
        for _ in range(20):
            p = rng.choice([11, 101, 499])
            d = rng.randint(1, 6)
            coeffs = [rng.randrange(p) for _ in range(d)] + [rng.randrange(1, p)]
            dist = value_distribution(PolyModP(p, tuple(coeffs)))
            assert int(dist.counts.sum()) == p
            assert int(dist.counts.max()) <= d


class TestSumTable:
    def test_zero_entry_is_sqrt_p(self):
        table = sum_table(reduce_mod_p(CUBIC, 101).poly)
        assert table.values[0] == pytest.approx(math.sqrt(101), abs=1e-10)
        assert table.masked()[0] == 0

    def test_direct_sum_at_multiple_of_p(self):
        # every phase term is 1, so the raw value is sqrt(p); consumers
        # see it masked to 0
        fp = reduce_mod_p(CUBIC, 13).poly
        assert sum_single(fp, 0) == pytest.approx(math.sqrt(13), abs=1e-12)
        assert sum_single(fp, 26) == pytest.approx(math.sqrt(13), abs=1e-12)
        assert sum_table(fp).value(26) == 0

    def test_gauss_sums_have_unit_modulus(self):
        table = sum_table(PolyModP(13, (0, 0, 1)))
        mags = np.abs(table.masked()[1:])
        assert np.max(np.abs(mags - 1.0)) < 1e-9

    def test_matches_direct_summation(self):
        fp = reduce_mod_p(CUBIC, 101).poly
        table = sum_table(fp)
        for a in range(0, 101, 7):
            assert table.values[a] == pytest.approx(
                sum_single(fp, a), abs=1e-8 * math.sqrt(101)
            )

    def test_parseval_ties_table_to_counts(self):
        rng = random.Random(7)
        for _ in range(10):
            p = rng.choice([101, 499, 997])
            coeffs = [rng.randrange(p) for _ in range(3)] + [rng.randrange(1, p)]
            fp = PolyModP(p, tuple(coeffs))
            dist = value_distribution(fp)
            table = sum_table(fp, dist=dist)
            lhs = float((np.abs(table.values) ** 2).sum()) * p  # sum |S(a)|^2
            rhs = p * dist.second_power_sum
            assert lhs == pytest.approx(rhs, rel=1e-6)

    def test_conjugate_symmetry(self):
        fp = reduce_mod_p(CUBIC, 199).poly
        table = sum_table(fp)
        for a in range(1, 199):
            assert table.values[-a % 199] == pytest.approx(
                np.conj(table.values[a]), abs=1e-9
            )

    def test_prime_cap(self):
        with pytest.raises(PrimeTooLarge):
            sum_table(reduce_mod_p(CUBIC, 101).poly, cap=50)


class TestNormalizedTable:
    def test_cubic_shift_phase(self):
        # shift c = -1: W~(a) = e(-a/p) W(a), Legendre power is even for d=3
        p = 101
        fp = reduce_mod_p(CUBIC, p).poly
        plain = sum_table(fp)
        data = critical_data(fp)
        assert data.shift.value == p - 1
        norm = normalized_table(fp, data=data)
        a = 17
        expect = np.exp(-2j * math.pi * a / p) * plain.values[a]
        assert norm.values[a] == pytest.approx(expect, abs=1e-10)

    def test_symmetric_normalization(self):
        p = 101
        fp = reduce_mod_p(CUBIC, p).poly
        plain = sum_table(fp)
        witness = odd_form(CUBIC)  # (0, 1, X^3+X)
        norm = normalized_table(fp, odd_witness=witness)
        a = 5
        expect = np.exp(-2j * math.pi * a / p) * plain.values[a]
        assert norm.values[a] == pytest.approx(expect, abs=1e-10)

    def test_magnitudes_preserved(self):
        rng = random.Random(11)
        for _ in range(25):
            p = rng.choice([101, 103, 199])
            d = rng.choice([3, 4, 5])
            coeffs = [rng.randrange(p) for _ in range(d)] + [rng.randrange(1, p)]
            fp = PolyModP(p, tuple(coeffs))
            plain = sum_table(fp)
            delta = rng.randrange(p)
            norm = normalized_table(fp, odd_witness=(0, delta, None))
            assert np.max(
                np.abs(np.abs(norm.values[1:]) - np.abs(plain.values[1:]))
            ) < 1e-12

    def test_even_legendre_power_for_quartic(self):
        # d = 4: chi(a)^3 = chi(a) actually flips signs at non-residues
        p = 13
        fp = PolyModP(p, (0, 1, 0, 0, 1))
        data = critical_data(fp)
        norm = normalized_table(fp, data=data)
        chi = legendre_symbols(p)
        plain = sum_table(fp)
        a = 2
        expect = (
            chi[a]
            * np.exp(2j * math.pi * data.shift.value * a / p)
            * plain.values[a]
        )
        assert norm.values[a] == pytest.approx(expect, abs=1e-10)


class TestTwistedExtension:
    def test_single_prime(self):
        tables = tables_for_primes(CUBIC, [7])
        assert twisted_extend(tables, 3, 7) == tables[7].value(3)

    def test_matches_direct_crt_sum(self):
        tables = tables_for_primes(CUBIC, [2, 3, 5, 7, 11, 13])
        rng = random.Random(17)
        for q in (15, 35, 77, 105, 110, 2 * 7 * 13):
            for _ in range(3):
                a = rng.randrange(1, q)
                if math.gcd(a, q) > 1:
                    continue
                got = twisted_extend(tables, a, q)
                want = direct_sum_modq(CUBIC, a, q)
                assert got == pytest.approx(want, abs=1e-9)

    def test_masking_policy(self):
        tables = tables_for_primes(CUBIC, [2, 3, 5, 7])
        assert twisted_extend(tables, 1, 12) == 0          # non-squarefree
        assert twisted_extend(tables, 7, 14) == 0          # gcd(a, q) > 1
        with pytest.raises(NonSquarefree):
            twisted_extend(tables, 1, 12, strict=True)

    def test_missing_table(self):
        tables = tables_for_primes(CUBIC, [3])
        with pytest.raises(MissingTable):
            twisted_extend(tables, 1, 15)

    def test_peeling_order_is_associative(self):
        # direct product form vs two-step peeling through (7.1)-style splits
        tables = tables_for_primes(CUBIC, [5, 7, 11])
        q1, q2 = 5, 77
        q = q1 * q2
        a = 2
        full = twisted_extend(tables, a, q)
        q1bar = pow(q1, -1, q2)
        q2bar = pow(q2, -1, q1)
        split = twisted_extend(tables, a * q1bar, q2) * twisted_extend(
            tables, a * q2bar, q1
        )
        assert full == pytest.approx(split, abs=1e-10)

    def test_q_one(self):
        assert twisted_extend({}, 5, 1) == 1.0


class TestMeasureTransform:
    def test_uniform(self):
        table, env = measure_transform(5, [0.2] * 5)
        assert np.abs(table.values[1:]).max() < 1e-12
        assert env.averages[5] == pytest.approx(0.0, abs=1e-6)
        assert env.bounds[5] == 1.0

    def test_point_mass(self):
        table, env = measure_transform(7, [1, 0, 0, 0, 0, 0, 0])
        assert np.abs(table.values - 1.0).max() < 1e-12
        assert env.averages[7] == pytest.approx(math.sqrt(1 - 1 / 7), rel=1e-12)

    def test_polynomial_image_measure(self):
        # v = N/p reproduces V = W / sqrt(p)
        p = 101
        fp = reduce_mod_p(CUBIC, p).poly
        dist = value_distribution(fp)
        table, _ = measure_transform(p, dist.counts / p)
        w = sum_table(fp)
        assert np.abs(table.values - w.values / math.sqrt(p)).max() < 1e-9

    def test_rejects_non_measures(self):
        with pytest.raises(NotAMeasure):
            measure_transform(3, [0.5, 0.6, 0.1])
        with pytest.raises(NotAMeasure):
            measure_transform(3, [-0.1, 0.6, 0.5])


class TestWeil:
    def test_gauss(self):
        table = sum_table(PolyModP(13, (0, 0, 1)))
        rep = weil_check(table, 2)
        assert rep.max_modulus == pytest.approx(1.0, abs=1e-9)
        assert not rep.violated

    def test_cubic_margin(self):
        table = sum_table(reduce_mod_p(CUBIC, 9973).poly)
        rep = weil_check(table, 3)
        assert rep.max_modulus <= 2 + 1e-8

    def test_quintic(self):
        table = sum_table(PolyModP(101, (0, 1, 0, 0, 0, 1)))
        rep = weil_check(table, 5)
        assert rep.max_modulus <= 4 + 1e-8


class TestEnvelope:
    def test_invariant(self):
        tables = tables_for_primes(CUBIC, [5, 7, 11, 13])
        env = TwistedEnvelope.from_tables(tables)
        for p, G in env.bounds.items():
            assert env.averages[p] <= G <= env.cap

    def test_squarefree_helper(self):
        assert [n for n in range(1, 20) if is_squarefree_int(n)] == [
            1, 2, 3, 5, 6, 7, 10, 11, 13, 14, 15, 17, 19,
        ]


class TestGeneralPrimePath:
    def test_p_equals_two(self):
        table = table_for_prime(CUBIC, 2)
        # f(0) = f(1) = 1 mod 2: N = [0, 2], W(1;2) = sqrt(2) e(1/2) = -sqrt(2)
        assert table.value(1) == pytest.approx(-math.sqrt(2), abs=1e-12)

    def test_matches_polymod_path(self):
        for p in (3, 5, 7, 101):
            t1 = table_for_prime(CUBIC, p)
            t2 = sum_table(reduce_mod_p(CUBIC, p).poly)
            assert np.abs(t1.values - t2.values).max() < 1e-12

    def test_distribution_denominator_guard(self):
        with pytest.raises(ValueError):
            distribution_for_prime(P(["1/3", 1]), 3)

    def test_direct_sum_denominator_guard(self):
        with pytest.raises(ValueError):
            direct_sum_modq(P(["1/3", 1, 1]), 1, 15)
        # coprime denominators are fine
        direct_sum_modq(P(["1/7", 1, 1]), 1, 15)
