"""Probit sampling, the population oracles, and the margin condition."""

import math

import numpy as np
import pytest

from problogit.model import (
    CURVATURE_THRESHOLD,
    Dataset,
    ModelSpec,
    SeedSpec,
    margin_check,
    population_excess_unbounded,
    population_hessian,
    population_risk,
    population_risk_h,
    population_unbounded_mean,
    sample,
)
from problogit.quadrature import sigma_to_tau_star
from util import mc_mean_se


def _unit(rng, p):
    v = rng.standard_normal(p)
    return v / np.linalg.norm(v)


class TestSampling:
    def test_same_stream_is_byte_identical(self):
        spec = ModelSpec.along_first_axis(4, 0.3)
        seeds = SeedSpec(99)
        a = sample(spec, 500, seeds.rng(2, 7))
        b = sample(spec, 500, seeds.rng(2, 7))
        assert a.X.tobytes() == b.X.tobytes()
        assert a.y.tobytes() == b.y.tobytes()

    def test_different_replicates_differ(self):
        spec = ModelSpec.along_first_axis(4, 0.3)
        seeds = SeedSpec(99)
        a = sample(spec, 500, seeds.rng(2, 7))
        b = sample(spec, 500, seeds.rng(2, 8))
        assert a.X.tobytes() != b.X.tobytes()

    def test_stream_id_is_stable(self):
        seeds = SeedSpec(99)
        assert seeds.stream_id(1, 2) == seeds.stream_id(1, 2)
        assert seeds.stream_id(1, 2) != seeds.stream_id(2, 1)

    def test_negligible_noise_matches_signs(self):
        spec = ModelSpec.along_first_axis(3, 1e-12)
        data = sample(spec, 20_000, SeedSpec(1).rng())
        noiseless = np.where(data.X @ spec.beta_star >= 0.0, 1.0, -1.0)
        assert np.array_equal(data.y, noiseless)

    def test_unit_noise_wrong_label_frequency(self):
        spec = ModelSpec.along_first_axis(3, 1.0)
        data = sample(spec, 1_000_000, SeedSpec(2).rng())
        noiseless = np.where(data.X @ spec.beta_star >= 0.0, 1.0, -1.0)
        assert abs(float(np.mean(data.y != noiseless)) - 0.25) < 0.002

    def test_labels_are_signs(self):
        spec = ModelSpec.along_first_axis(2, 0.5)
        data = sample(spec, 100, SeedSpec(3).rng())
        assert set(np.unique(data.y)) <= {-1.0, 1.0}

    def test_wrong_label_frequency_converges_at_root_n(self):
        from problogit.geometry import wrong_label_prob

        sigma = 0.4
        spec = ModelSpec.along_first_axis(3, sigma)
        q = wrong_label_prob(sigma)
        for cell, n in enumerate((1_000, 10_000, 100_000)):
            data = sample(spec, n, SeedSpec(40).rng(cell, 0))
            noiseless = np.where(data.X @ spec.beta_star >= 0.0, 1.0, -1.0)
            freq = float(np.mean(data.y != noiseless))
            assert abs(freq - q) <= 4.0 * math.sqrt(q * (1.0 - q) / n)

    def test_csv_round_trip_is_exact(self, tmp_path):
        spec = ModelSpec.along_first_axis(3, 0.5)
        data = sample(spec, 57, SeedSpec(4).rng())
        path = tmp_path / "data.csv"
        data.to_csv(path)
        back = Dataset.from_csv(path)
        assert np.array_equal(data.X, back.X)
        assert np.array_equal(data.y, back.y)
        header = path.read_text().splitlines()[0]
        assert header == "x1,x2,x3,y"

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            ModelSpec(p=3, sigma=0.0, beta_star=np.array([1.0, 0.0, 0.0]))
        with pytest.raises(ValueError):
            ModelSpec(p=3, sigma=0.5, beta_star=np.array([1.0, 1.0, 0.0]))


class TestUnboundedOracles:
    def test_no_noise_no_error_at_target(self):
        spec = ModelSpec.along_first_axis(4, 1e-15)
        assert population_unbounded_mean(spec.beta_star, spec) == pytest.approx(0.0, abs=1e-15)

    def test_closed_form_at_unit_noise(self):
        spec = ModelSpec.along_first_axis(4, 1.0)
        expected = (1.0 / math.sqrt(2.0 * math.pi)) * (1.0 - 1.0 / math.sqrt(2.0))
        assert population_unbounded_mean(spec.beta_star, spec) == pytest.approx(
            expected, rel=1e-15
        )
        assert expected == pytest.approx(0.11685, abs=5e-6)

    def test_against_monte_carlo(self):
        rng = np.random.default_rng(21)
        sigma = 0.5
        spec = ModelSpec.along_first_axis(5, sigma)
        beta = _unit(rng, 5)
        rho = float(beta @ spec.beta_star)
        s = math.sqrt(1.0 - rho * rho)

        def draw(r, size):
            z1 = r.standard_normal(size)
            z2 = r.standard_normal(size)
            eps = r.standard_normal(size)
            xb = rho * z1 + s * z2
            y = np.where(z1 + sigma * eps >= 0.0, 1.0, -1.0)
            return np.abs(xb) * (y * xb < 0.0)

        mean, se = mc_mean_se(draw, 4_000_000, rng)
        assert abs(population_unbounded_mean(beta, spec) - mean) <= 4.0 * se

    def test_excess_trivia(self):
        spec = ModelSpec.along_first_axis(4, 0.7)
        assert population_excess_unbounded(spec.beta_star, spec) == 0.0

    def test_excess_orthogonal_noiseless_limit(self):
        spec = ModelSpec.along_first_axis(2, 1e-15)
        beta = np.array([0.0, 1.0])
        assert population_excess_unbounded(beta, spec) == pytest.approx(
            2.0 / math.sqrt(8.0 * math.pi), rel=1e-12
        )

    def test_excess_equals_difference_of_means(self):
        rng = np.random.default_rng(22)
        spec = ModelSpec.along_first_axis(6, 0.4)
        for _ in range(20):
            beta = _unit(rng, 6)
            diff = population_unbounded_mean(beta, spec) - population_unbounded_mean(
                spec.beta_star, spec
            )
            assert abs(population_excess_unbounded(beta, spec) - diff) < 1e-14


class TestPopulationRisk:
    def test_small_tau_limit(self):
        spec = ModelSpec.along_first_axis(3, 0.5)
        assert population_risk(1e-10, spec.beta_star, spec) == pytest.approx(
            math.log(2.0), abs=1e-9
        )

    def test_minimum_over_tau_at_calibrated_length(self):
        sigma = 0.5
        spec = ModelSpec.along_first_axis(3, sigma)
        tau_star = sigma_to_tau_star(sigma)

        # independent root find on the one-sided difference quotient
        from scipy.optimize import brentq

        def deriv(tau):
            h = 1e-6 * tau
            return (
                population_risk(tau + h, spec.beta_star, spec)
                - population_risk(tau - h, spec.beta_star, spec)
            ) / (2.0 * h)

        root = brentq(deriv, 0.5, 50.0, xtol=1e-10)
        assert abs(root - tau_star) < 1e-6

    def test_against_monte_carlo(self):
        rng = np.random.default_rng(23)
        sigma = 0.5
        spec = ModelSpec.along_first_axis(5, sigma)
        beta = _unit(rng, 5)
        tau = 2.9
        rho = float(beta @ spec.beta_star)
        s = math.sqrt(1.0 - rho * rho)

        def draw(r, size):
            z1 = r.standard_normal(size)
            z2 = r.standard_normal(size)
            eps = r.standard_normal(size)
            xb = rho * z1 + s * z2
            y = np.where(z1 + sigma * eps >= 0.0, 1.0, -1.0)
            return np.logaddexp(0.0, -y * tau * xb)

        mean, se = mc_mean_se(draw, 4_000_000, rng)
        assert abs(population_risk(tau, beta, spec) - mean) <= 4.0 * se

    def test_direction_optimality(self):
        # at any fixed length, the true direction has strictly smaller risk
        rng = np.random.default_rng(24)
        spec = ModelSpec.along_first_axis(4, 0.5)
        for _ in range(100):
            tau = rng.uniform(0.2, 12.0)
            beta = _unit(rng, 4)
            if np.allclose(beta, spec.beta_star, atol=1e-12):
                continue
            assert population_risk(tau, beta, spec) > population_risk(
                tau, spec.beta_star, spec
            )

    def test_global_minimum_at_target(self):
        rng = np.random.default_rng(25)
        sigma = 0.4
        spec = ModelSpec.along_first_axis(4, sigma)
        tau_star = sigma_to_tau_star(sigma)
        base = population_risk(tau_star, spec.beta_star, spec)
        for _ in range(100):
            tau = rng.uniform(0.2, 4.0 * tau_star)
            beta = _unit(rng, 4)
            assert population_risk(tau, beta, spec) >= base - 1e-12

    def test_h_parametrization_agrees(self):
        rng = np.random.default_rng(26)
        spec = ModelSpec.along_first_axis(5, 0.6)
        from problogit.geometry import HFrame, h_coordinates

        frame = HFrame.from_direction(spec.beta_star)
        for _ in range(10):
            beta = _unit(rng, 5)
            if beta @ spec.beta_star < 0:
                beta = -beta
            h = h_coordinates(frame, beta)
            tau = rng.uniform(0.5, 8.0)
            assert population_risk_h(tau, h, spec) == pytest.approx(
                population_risk(tau, beta, spec), rel=1e-12
            )


class TestPopulationHessian:
    def test_zero_tangent_blocks(self):
        spec = ModelSpec.along_first_axis(5, 0.5)
        H = population_hessian(3.0, np.zeros(4), spec)
        assert np.abs(H[0, 1:]).max() == 0.0
        c = 3.0 / math.sqrt(2.0 * math.pi * 1.25)
        assert np.abs(H[1:, 1:] - c * np.eye(4)).max() < 1e-14

    def test_matches_finite_differences(self):
        spec = ModelSpec.along_first_axis(5, 0.5)
        rng = np.random.default_rng(27)
        tau = rng.uniform(1.5, 6.0)
        h = rng.uniform(-0.3, 0.3, size=4)
        H = population_hessian(tau, h, spec)
        theta = np.concatenate([[tau], h])
        step = 1e-5

        def risk_of(v):
            return population_risk_h(v[0], v[1:], spec)

        q = theta.size
        fd = np.zeros((q, q))
        for i in range(q):
            for j in range(i, q):
                ei = np.eye(q)[i] * step
                ej = np.eye(q)[j] * step
                fd[i, j] = fd[j, i] = (
                    risk_of(theta + ei + ej)
                    - risk_of(theta + ei - ej)
                    - risk_of(theta - ei + ej)
                    + risk_of(theta - ei - ej)
                ) / (4.0 * step * step)
        assert np.abs(H - fd).max() / np.abs(H).max() < 1e-4

    def test_curvature_scalar_lower_bound(self):
        spec = ModelSpec.along_first_axis(3, 0.5)
        for tau_bar in (CURVATURE_THRESHOLD, 4.0, 6.0, 12.0):
            H = population_hessian(tau_bar, np.zeros(2), spec)
            assert H[0, 0] >= math.sqrt(1.0 / (8.0 * math.pi)) / tau_bar**3

    def test_domain_errors(self):
        spec = ModelSpec.along_first_axis(3, 0.5)
        with pytest.raises(ValueError):
            population_hessian(2.0, np.array([0.8, 0.7]), spec)
        with pytest.raises(ValueError):
            population_hessian(0.0, np.zeros(2), spec)


class TestMarginCheck:
    def test_in_band_samples_all_hold(self):
        spec = ModelSpec.along_first_axis(5, 0.2)
        reports = margin_check(spec, 1.0 / 6.0, 200, SeedSpec(31).rng())
        assert len(reports) == 200
        assert all(r.holds is True for r in reports if not r.skipped)
        assert sum(not r.skipped for r in reports) == 200

    def test_excess_risk_zero_at_target(self):
        sigma = 0.2
        spec = ModelSpec.along_first_axis(4, sigma)
        tau_star = sigma_to_tau_star(sigma)
        base = population_risk(tau_star, spec.beta_star, spec)
        assert population_risk(tau_star, spec.beta_star, spec) - base == 0.0

    def test_out_of_band_kappa_skips(self):
        spec = ModelSpec.along_first_axis(4, 0.2)
        reports = margin_check(spec, 0.4, 5, SeedSpec(32).rng())
        assert all(r.skipped for r in reports)
        assert all("kappa_tau" in (r.reason or "") for r in reports)

    def test_large_sigma_skips_on_threshold(self):
        # sigma = 1 puts tau_star below the curvature threshold
        spec = ModelSpec.along_first_axis(4, 1.0)
        reports = margin_check(spec, 1.0 / 6.0, 3, SeedSpec(33).rng())
        assert all(r.skipped for r in reports)
        assert all("curvature threshold" in (r.reason or "") for r in reports)
