"""Reference moments and the Haar Monte Carlo oracle."""

import math

import numpy as np
import pytest

from expsumlab.rmt import (
    FAMILY_SU,
    FAMILY_USP,
    GroupSpec,
    haar_sample,
    mc_trace_moment,
    reference_moment,
    symplectic_form,
)


class TestReferenceMoments:
    def test_su_values(self):
        spec = GroupSpec(FAMILY_SU, 4)
        assert reference_moment(spec, 0) == (1, True)
        assert reference_moment(spec, 2) == (2, True)
        assert reference_moment(spec, 4) == (24, True)
        assert reference_moment(spec, 5) == (120, False)  # upper bound only

    def test_usp_values(self):
        spec = GroupSpec(FAMILY_USP, 4)
        assert reference_moment(spec, 1) == (1, True)
        assert reference_moment(spec, 2) == (3, True)
        assert reference_moment(spec, 3) == (15, False)

    def test_first_moment_is_one(self):
        for n in range(2, 8):
            assert reference_moment(GroupSpec(FAMILY_SU, n), 1) == (1, True)
        for n in range(2, 8, 2):
            assert reference_moment(GroupSpec(FAMILY_USP, n), 1) == (1, True)

    def test_odd_symplectic_rejected(self):
        with pytest.raises(ValueError):
            GroupSpec(FAMILY_USP, 3)


class TestSampling:
    def test_su1_trivial(self):
        u = haar_sample(GroupSpec(FAMILY_SU, 1), seed=5)
        assert u.shape == (1, 1)
        assert u[0, 0] == pytest.approx(1.0, abs=1e-12)

    def test_su_unitary_and_det(self):
        for seed in range(5):
            u = haar_sample(GroupSpec(FAMILY_SU, 4), seed=seed)
            assert np.abs(u.conj().T @ u - np.eye(4)).max() <= 1e-10
            assert abs(np.linalg.det(u) - 1) <= 1e-10

    def test_usp_unitary_and_symplectic(self):
        j = symplectic_form(4)
        for seed in range(5):
            u = haar_sample(GroupSpec(FAMILY_USP, 4), seed=seed)
            assert np.abs(u.conj().T @ u - np.eye(4)).max() <= 1e-10
            assert np.abs(u.T @ j @ u - j).max() <= 1e-9
            assert abs(np.trace(u).imag) <= 1e-12

    def test_reproducible(self):
        a = haar_sample(GroupSpec(FAMILY_SU, 3), seed=9)
        b = haar_sample(GroupSpec(FAMILY_SU, 3), seed=9)
        assert np.array_equal(a, b)


class TestMonteCarlo:
    def test_k0_exact(self):
        est, se = mc_trace_moment(GroupSpec(FAMILY_SU, 4), 0, 2000, seed=1)
        assert est == 1.0 and se == 0.0

    def test_usp_small_k(self):
        spec = GroupSpec(FAMILY_USP, 4)
        for k in (1, 2):
            est, se = mc_trace_moment(spec, k, 20_000, seed=3)
            ref, exact = reference_moment(spec, k)
            assert exact
            assert abs(est - ref) <= 3 * se

    def test_convergence_across_dimensions(self):
        # every family/dimension pair up to 6, each exact k, at 1e5 samples
        for family, ns in ((FAMILY_SU, (2, 3, 4, 5, 6)), (FAMILY_USP, (2, 4, 6))):
            for n in ns:
                spec = GroupSpec(family, n)
                kmax = n if family == FAMILY_SU else n // 2
                for k in range(1, kmax + 1):
                    ref, exact = reference_moment(spec, k)
                    if not exact:
                        continue
                    est, se = mc_trace_moment(spec, k, 100_000, seed=41 + n)
                    assert abs(est - ref) <= 3 * se, (family, n, k, est, se)

    def test_haar_invariance_smoke(self):
        # left-multiplying by a fixed unitary leaves |Tr|^2 statistics alone
        spec = GroupSpec(FAMILY_SU, 3)
        fixed = haar_sample(spec, seed=123)
        rng = np.random.default_rng(7)
        from expsumlab.rmt import _su_batch

        mats = _su_batch(3, 30_000, rng)
        t1 = np.abs(np.einsum("...ii->...", mats)) ** 2
        t2 = np.abs(np.einsum("...ii->...", fixed[None] @ mats)) ** 2
        se = t1.std() / math.sqrt(len(t1))
        assert abs(t1.mean() - t2.mean()) <= 3 * se * 2

    def test_batching_invisible(self):
        spec = GroupSpec(FAMILY_USP, 4)
        a = mc_trace_moment(spec, 1, 25_000, seed=11)
        b = mc_trace_moment(spec, 1, 25_000, seed=11)
        assert a == b

    def test_minimum_samples(self):
        with pytest.raises(ValueError):
            mc_trace_moment(GroupSpec(FAMILY_SU, 2), 1, 10)
