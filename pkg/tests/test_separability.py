"""Separability certificates and the exact separation probability."""

import math

import numpy as np
import pytest

from problogit.estimator import FitConfig, fit
from problogit.separability import (
    SeparabilityVerdict,
    cover_probability,
    is_separable,
)


class TestVerdicts:
    def test_one_dimensional_positive(self):
        X = np.array([[1.0], [2.0], [0.5]])
        y = np.ones(3)
        verdict = is_separable(X, y)
        assert verdict.separable
        assert (y * (X @ verdict.separator)).min() >= 1.0

    def test_contradictory_pair_witness(self):
        X = np.array([[1.0, 2.0], [1.0, 2.0]])
        y = np.array([1.0, -1.0])
        verdict = is_separable(X, y)
        assert not verdict.separable
        assert np.allclose(verdict.witness, [0.5, 0.5])
        assert verdict.witness_norm <= 1e-12

    def test_zero_row_rejected(self):
        X = np.array([[0.0, 0.0], [1.0, 0.0]])
        y = np.array([1.0, 1.0])
        with pytest.raises(ValueError, match="zero row"):
            is_separable(X, y)

    def test_certificates_verify_against_raw_data(self):
        rng = np.random.default_rng(0)
        for _ in range(300):
            n = int(rng.integers(5, 40))
            p = int(rng.integers(1, 8))
            X = rng.standard_normal((n, p)) * rng.uniform(0.1, 10.0)
            y = np.where(rng.random(n) < 0.5, 1.0, -1.0)
            verdict = is_separable(X, y)
            if verdict.separable:
                assert (y * (X @ verdict.separator)).min() >= 1.0 - 1e-12
            else:
                w = verdict.witness
                assert w.min() >= 0.0
                assert abs(w.sum() - 1.0) < 1e-12
                Z = (y[:, None] * X)
                Z = Z / np.linalg.norm(Z, axis=1)[:, None]
                assert float(np.linalg.norm(w @ Z)) <= verdict.tol * (1 + 1e-9)

    def test_hint_fast_path_is_verified(self):
        rng = np.random.default_rng(1)
        X = rng.standard_normal((50, 3))
        beta = np.array([1.0, 0.0, 0.0])
        y = np.where(X @ beta >= 0, 1.0, -1.0)
        good = is_separable(X, y, hint=beta)
        assert good.separable and good.iterations == 0
        # a useless hint falls through to the full decision
        bad_hint = is_separable(X, y, hint=-beta)
        assert bad_hint.separable and bad_hint.iterations > 0

    def test_verdict_shape_validation(self):
        with pytest.raises(ValueError):
            SeparabilityVerdict(separable=True, tol=1e-9)
        with pytest.raises(ValueError):
            SeparabilityVerdict(separable=False, tol=1e-9)

    def test_agreement_with_fit(self):
        # a found separator means the ball estimator can push the loss
        # arbitrarily low once the radius is large
        rng = np.random.default_rng(2)
        found = 0
        while found < 5:
            X = rng.standard_normal((15, 3))
            y = np.where(rng.random(15) < 0.5, 1.0, -1.0)
            verdict = is_separable(X, y)
            if not verdict.separable:
                continue
            found += 1
            result = fit(X, y, FitConfig(M=1e6, tol=1e-10))
            assert result.loss < 1e-6


class TestCoverProbability:
    def test_exact_small_cases(self):
        assert cover_probability(5, 7) == 1.0
        assert cover_probability(3, 3) == 1.0
        assert cover_probability(10, 5) == 0.5
        assert cover_probability(20, 10) == 0.5
        assert cover_probability(10, 1) == 2.0 ** (-9)

    def test_matches_direct_sum(self):
        for n, p in ((20, 3), (20, 5), (35, 7)):
            direct = sum(math.comb(n - 1, k) for k in range(p)) / 2 ** (n - 1)
            assert cover_probability(n, p) == pytest.approx(direct, rel=1e-15)

    def test_log_space_branch_agrees(self):
        # just above the exact-arithmetic threshold
        exact = sum(math.comb(1000, k) for k in range(4)) / 2**1000
        assert cover_probability(1001, 4) == pytest.approx(exact, rel=1e-12)
        assert cover_probability(4000, 2000) == pytest.approx(0.5, rel=1e-9)

    def test_monotonicity(self):
        for n in (10, 25, 60):
            values = [cover_probability(n, p) for p in range(1, n + 1)]
            assert all(a <= b for a, b in zip(values, values[1:]))
        for p in (2, 5):
            values = [cover_probability(n, p) for n in range(p, 120)]
            assert all(a >= b for a, b in zip(values, values[1:]))

    def test_range(self):
        for n, p in ((2, 1), (50, 3), (2000, 10), (10**6, 3)):
            assert 0.0 <= cover_probability(n, p) <= 1.0

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            cover_probability(0, 1)
        with pytest.raises(ValueError):
            cover_probability(5, 0)


class TestEmpiricalLaw:
    def test_null_model_frequency_smoke(self):
        # small-R version of the acceptance empirical law
        rng = np.random.default_rng(3)
        n, p, reps = 14, 4, 2000
        hits = 0
        for _ in range(reps):
            X = rng.standard_normal((n, p))
            y = np.where(rng.random(n) < 0.5, 1.0, -1.0)
            hits += is_separable(X, y).separable
        q = cover_probability(n, p)
        se = math.sqrt(q * (1 - q) / reps)
        assert abs(hits / reps - q) <= 4.0 * se

    def test_double_dimension_frequency(self):
        rng = np.random.default_rng(4)
        reps, hits = 1500, 0
        for _ in range(reps):
            X = rng.standard_normal((8, 4))
            y = np.where(rng.random(8) < 0.5, 1.0, -1.0)
            hits += is_separable(X, y).separable
        se = math.sqrt(0.25 / reps)
        assert abs(hits / reps - 0.5) <= 4.0 * se
