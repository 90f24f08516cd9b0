"""Classifier tests: Morse / Sidon / symmetric / decomposition / Dickson."""

import random
from fractions import Fraction

import pytest

from expsumlab.errors import BadCharacteristic, DuplicateValues, SmallPrime
from expsumlab.field_poly import (
    PolyExact,
    PolyModP,
    build_field,
    dickson,
    reduce_mod_p,
)
from expsumlab.genericity import (
    AffineMap,
    classify,
    critical_data,
    decompose,
    dickson_equivalent,
    fried_predict,
    good_primes,
    is_indecomposable,
    is_morse,
    is_sidon,
    is_symmetric_sidon,
    linear_equivalent,
    odd_form,
)


def P(*coeffs):
    return PolyExact.from_coeffs(coeffs)


def elems(field, *ints):
    return [field.from_base(v) for v in ints]


class TestMorse:
    def test_examples(self):
        assert not is_morse(PolyModP(11, (0, 0, 0, 1)))   # X^3: f' = 3X^2
        assert is_morse(PolyModP(11, (1, 1, 0, 1)))       # X^3+X+1
        assert is_morse(PolyModP(7, (1, 0, 1)))           # X^2+1

    def test_small_prime_rejected(self):
        with pytest.raises(SmallPrime):
            is_morse(PolyModP(5, (1, 1, 0, 1)))  # needs p > 5

    def test_invariance_under_shift_and_flip(self):
        # f + c and -f + c are Morse whenever f is, for every shift c that
        # keeps 0 out of the translated critical-value set (a shift hitting
        # the negative of a critical value creates a double root, so those
        # d-1 residues are excluded from the sample).
        rng = random.Random(4)
        f = P(1, 1, 0, 1)
        for p in (11, 13, 101):
            fp = reduce_mod_p(f, p).poly
            assert is_morse(fp)
            rational_values = {
                v.to_int()
                for v in critical_data(fp).values
                if v.in_prime_field()
            }
            bad = rational_values | {(-v) % p for v in rational_values}
            picked = 0
            while picked < 5:
                c = rng.randrange(p)
                if c in bad:
                    continue
                picked += 1
                shifted = fp + PolyModP(p, (c,))
                flipped = (-fp) + PolyModP(p, (c,))
                assert is_morse(shifted)
                assert is_morse(flipped)

    def test_shift_onto_critical_value_breaks_squarefreeness(self):
        # The complement of the invariance test: shifting by the negative
        # of a rational critical value forces a repeated root.
        fp = reduce_mod_p(P(1, 1, 0, 1), 13).poly
        values = [
            v.to_int() for v in critical_data(fp).values if v.in_prime_field()
        ]
        assert values, "X^3+X+1 has rational critical values mod 13"
        shifted = fp + PolyModP(13, ((-values[0]) % 13,))
        assert not is_morse(shifted)


class TestCriticalData:
    def test_odd_cubic_sum_zero(self):
        data = critical_data(PolyModP(11, (0, 1, 0, 1)))  # X^3 + X
        assert data.value_sum.value == 0
        assert data.shift.value == 0

    def test_cubic_shift(self):
        # critical values of X^3+X+1 sum to 2, so the shift is -1 mod p.
        for p in (11, 13, 101):
            data = critical_data(reduce_mod_p(P(1, 1, 0, 1), p).poly)
            assert data.value_sum.value == 2 % p
            assert data.shift.value == (-1) % p
            assert len(data.values) == 2

    def test_bad_characteristic(self):
        f = PolyModP(13, (0, 1, 0, 0, 0, 0, 1))  # X^6 + X over F_13: 13 > 2*6-1
        assert is_morse(f)
        # d = 6, p = 5 divides d-1: rejected before any Morse validation
        with pytest.raises(BadCharacteristic):
            critical_data(PolyModP(5, (0, 1) + (0,) * 4 + (1,)))

    def test_shift_identity(self):
        # (d-1)*shift + value_sum = 0 for every Morse polynomial tested.
        rng = random.Random(8)
        for _ in range(20):
            d = rng.randint(2, 5)
            f = P(*([rng.randint(-5, 5) for _ in range(d)] + [rng.randint(1, 4)]))
            p = rng.choice([101, 103, 107, 109])
            fp = reduce_mod_p(f, p).poly
            if fp.degree != d or not is_morse(fp):
                continue
            if (d - 1) % p == 0:
                continue
            data = critical_data(fp)
            assert ((d - 1) * data.shift.value + data.value_sum.value) % p == 0


class TestSidon:
    def test_two_element_always(self):
        field = build_field(101, 1)
        assert is_sidon(elems(field, 5, 9))

    def test_arithmetic_progression_fails(self):
        field = build_field(101, 1)
        assert not is_sidon(elems(field, 0, 1, 2, 3))

    def test_classic_sidon_set(self):
        field = build_field(101, 1)
        assert is_sidon(elems(field, 0, 1, 3, 7))

    def test_duplicates_rejected(self):
        field = build_field(101, 1)
        with pytest.raises(DuplicateValues):
            is_sidon(elems(field, 1, 1))

    def test_affine_invariance(self):
        rng = random.Random(12)
        field = build_field(101, 1)
        base = elems(field, 0, 1, 3, 7)
        for _ in range(20):
            a = rng.randrange(1, 101)
            d = rng.randrange(101)
            image = [v.scale(a) + field.from_base(d) for v in base]
            assert is_sidon(image) == is_sidon(base)


class TestSymmetricSidon:
    def test_symmetric_pair(self):
        field = build_field(101, 1)
        alpha = is_symmetric_sidon(elems(field, 5, 96))  # {v, -v}
        assert alpha is not None and alpha.to_int() == 0

    def test_progression_is_symmetric_sidon(self):
        # {0,1,2} = 1 + {-1,0,1}: symmetric about alpha = 2 and every
        # quadruple coincidence is a reflection (0+2 = 1+1 has b = alpha-a),
        # so the relaxed test accepts it.
        field = build_field(101, 1)
        alpha = is_symmetric_sidon(elems(field, 0, 1, 2))
        assert alpha is not None and alpha.to_int() == 2

    def test_nonsymmetric_sidon_set(self):
        field = build_field(101, 1)
        assert is_symmetric_sidon(elems(field, 0, 1, 3, 7)) is None

    def test_symmetric_but_not_sidon_relaxed_failure(self):
        # {-3,-1,1,3} is symmetric about 0 but -3+3 = -1+1 = 0+... the
        # failing quadruple is (-3,3,-1,1): a not in {c,d} and b != -a fails?
        # b = 3 = alpha - a = 0-(-3) = 3: reflection, allowed.  Genuine
        # failure needs a non-reflective coincidence: {-3,-2,2,3}:
        # (-3)+3 = (-2)+2 both reflections; (-3)+2 = (-2)+... = -1: only
        # pair sums: try {0,1,5,6}: alpha = 6; 0+6 = 1+5: a=0, b=6=alpha-0:
        # reflection again.  {0,2,3,5}: alpha=5; 2+3=0+5: a=2,b=3=5-2:
        # reflection.  A symmetric set failing relaxed-Sidon: {0,1,2,3,4}:
        # alpha=4; 1+2=0+3: b=2 != 4-1=3 -> fails.
        field = build_field(101, 1)
        assert is_symmetric_sidon(elems(field, 0, 1, 2, 3, 4)) is None


class TestOddForm:
    def test_basic(self):
        x0, delta, g = odd_form(P(1, 1, 0, 1))
        assert (x0, delta) == (0, 1)
        assert g == P(0, 1, 0, 1)

    def test_shifted(self):
        x0, delta, g = odd_form(P(0, 0, 3, 1))  # X^3+3X^2 = (t^3-3t)+2 at t=X+1
        assert (x0, delta) == (-1, 2)
        assert g == P(0, -3, 0, 1)

    def test_even_degree_absent(self):
        assert odd_form(P(0, 1, 0, 0, 1)) is None

    def test_witness_reconstructs(self):
        rng = random.Random(3)
        for _ in range(20):
            d = rng.choice([3, 5])
            f = P(*([rng.randint(-5, 5) for _ in range(d)] + [rng.randint(1, 4)]))
            w = odd_form(f)
            if w is None:
                continue
            x0, delta, g = w
            assert f.shift_arg(x0) == g + P(delta)
            assert all(g.coeff(i) == 0 for i in range(0, d + 1, 2))


class TestDecomposition:
    def test_square_of_quadratic(self):
        g, h = decompose(P(1, 0, 2, 0, 1))  # (X^2+1)^2
        assert h == P(0, 0, 1)
        assert g == P(1, 2, 1)
        assert g.compose(h) == P(1, 0, 2, 0, 1)

    def test_prime_degree(self):
        assert is_indecomposable(P(0, 1, 0, 0, 0, 1))  # X^5+X

    def test_x6_plus_x(self):
        assert is_indecomposable(P(0, 1, 0, 0, 0, 0, 1))  # X^6+X

    def test_random_compositions_detected(self):
        rng = random.Random(21)
        for _ in range(20):
            dg, dh = rng.choice([(2, 2), (2, 3), (3, 2)])
            g = P(*([rng.randint(-4, 4) for _ in range(dg)] + [rng.randint(1, 3)]))
            h = P(*([rng.randint(-4, 4) for _ in range(dh)] + [rng.randint(1, 3)]))
            f = g.compose(h)
            got = decompose(f)
            assert got is not None
            gg, hh = got
            assert gg.compose(hh) == f

    def test_morse_implies_indecomposable(self):
        rng = random.Random(33)
        checked = 0
        while checked < 8:
            d = rng.choice([4, 6])
            f = P(*([rng.randint(-5, 5) for _ in range(d)] + [rng.randint(1, 4)]))
            try:
                report = classify(f)
            except Exception:
                continue
            if report.morse:
                assert report.indecomposable
                checked += 1


class TestLinearEquivalence:
    def test_scaled_cubic(self):
        w = linear_equivalent(P(0, 0, 0, 1), P(3, 0, 0, 8))
        assert w.rational and w.map == AffineMap(
            Fraction(8), Fraction(3), Fraction(1), Fraction(0)
        )

    def test_support_mismatch(self):
        assert linear_equivalent(P(1, 1, 0, 1), P(0, 0, 0, 1)) is None

    def test_quartic_rational(self):
        w = linear_equivalent(P(0, 0, 1, 0, 1), P(0, 0, 4, 0, 1))
        assert w.rational and w.map.c == Fraction(1, 2)
        assert w.map.apply(P(0, 0, 1, 0, 1)) == P(0, 0, 4, 0, 1)

    def test_quartic_closure_only(self):
        f, g = P(0, 0, 1, 0, 1), P(0, 0, 2, 0, 1)  # c^2 = 1/2 irrational
        assert linear_equivalent(f, g, over="rational") is None
        w = linear_equivalent(f, g, over="algebraic_closure")
        assert w is not None and not w.rational

    def test_equivalence_relation(self):
        rng = random.Random(14)
        for _ in range(15):
            d = rng.choice([3, 4, 5])
            f = P(*([rng.randint(-4, 4) for _ in range(d)] + [rng.randint(1, 3)]))
            m1 = AffineMap(
                Fraction(rng.randint(1, 4)),
                Fraction(rng.randint(-4, 4)),
                Fraction(rng.choice([1, 2, 3, -1])),
                Fraction(rng.randint(-3, 3)),
            )
            m2 = AffineMap(
                Fraction(rng.choice([1, 2, -2])),
                Fraction(rng.randint(-4, 4)),
                Fraction(rng.choice([1, -1, 2])),
                Fraction(rng.randint(-3, 3)),
            )
            g = m1.apply(f)
            h = m2.apply(g)
            # reflexive
            assert linear_equivalent(f, f).rational
            # symmetric with invertible witness
            w_fg = linear_equivalent(f, g)
            assert w_fg is not None and w_fg.map.apply(f) == g
            assert w_fg.map.invert().apply(g) == f
            # transitive: composition is a valid witness
            w_gh = linear_equivalent(g, h)
            composed = w_gh.map.compose_with(w_fg.map)
            assert composed.apply(f) == h


class TestDickson:
    def test_x3_plus_x(self):
        assert dickson_equivalent(P(0, 1, 0, 1)) == Fraction(-1, 3)

    def test_constant_shift_allowed(self):
        assert dickson_equivalent(P(1, 1, 0, 1)) == Fraction(-1, 3)

    def test_quintic_not_dickson(self):
        assert dickson_equivalent(P(1, 0, 1, 0, 0, 1)) is None  # X^5+X^2+1

    def test_scaled_dickson_found(self):
        # 2*D_5(3X, 7) - 4 is still Dickson-equivalent
        f = dickson(5, 7).scale_arg(3).scale(2) + P(-4)
        assert dickson_equivalent(f) is not None


class TestFried:
    def test_cases(self):
        assert fried_predict(P(0, 0, 0, 0, 1)) == "Reducible"          # X^4
        assert fried_predict(P(1, 1, 0, 1)) == "AbsolutelyIrreducible"
        assert fried_predict(dickson(5, 1)) == "Undetermined"
        assert fried_predict(P(0, 0, 0, 1)) == "Reducible"             # X^3 itself


class TestClassify:
    def test_cubic_symmetric(self):
        r = classify(P(1, 1, 0, 1), certificate_primes=(11, 13))
        assert r.verdict == "SymmetricSidonMorse"
        assert r.morse and r.indecomposable
        x0, delta, g = r.odd_witness
        assert (x0, delta, g) == (0, 1, P(0, 1, 0, 1))

    def test_x3_not_morse(self):
        r = classify(P(0, 0, 0, 1))
        assert r.verdict == "NotMorse"

    def test_quintic_nonsymmetric(self):
        r = classify(P(1, 0, 1, 0, 0, 1))
        assert r.verdict == "SidonMorse"
        assert r.sidon is True
        assert not r.symmetric_sidon_morse
        assert r.dickson_param is None

    def test_decomposable_quartic(self):
        r = classify(P(1, 0, 2, 0, 1))
        assert r.verdict == "NotMorse"
        assert not r.indecomposable
        g, h = r.decomposition
        assert g.compose(h) == P(1, 0, 2, 0, 1)

    def test_classify_invariant_under_affine_value_maps(self):
        base = classify(P(1, 1, 0, 1))
        for c in (Fraction(2), Fraction(-5), Fraction(1, 3)):
            for sign in (1, -1):
                f = P(1, 1, 0, 1).scale(sign) + P(c)
                assert classify(f).verdict == base.verdict

    def test_report_serializes(self):
        r = classify(P(1, 1, 0, 1))
        data = r.to_jsonable()
        assert data["verdict"] == "SymmetricSidonMorse"
        assert data["odd_witness"]["g"] == ["0", "1", "0", "1"]

    def test_good_prime_screen(self):
        # 31 divides disc(X^3+X+1) = -31 and must be rejected.
        f = P(1, 1, 0, 1)
        assert good_primes(f, [2, 3, 5, 7, 31, 11]) == [7, 11]
