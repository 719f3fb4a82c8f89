"""Loss pieces, the projected-gradient solver, and the sklearn wrapper."""

import math

import numpy as np
import pytest
from sklearn.base import clone

from problogit.estimator import (
    BallLogisticRegression,
    DegenerateFitError,
    FitConfig,
    FitResult,
    SolverError,
    bounded_term,
    decompose,
    fit,
    logistic_loss,
    loss_gradient,
    unbounded_term,
)
from problogit.model import ModelSpec, SeedSpec, sample
from util import golden_section_min


def _probit_data(n, p, sigma, seed, beta_star=None):
    if beta_star is None:
        spec = ModelSpec.along_first_axis(p, sigma)
    else:
        spec = ModelSpec(p=p, sigma=sigma, beta_star=beta_star)
    data = sample(spec, n, SeedSpec(seed).rng())
    return data.X, data.y, spec


class TestLossPieces:
    def test_loss_at_zero_is_log2(self):
        X, y, _ = _probit_data(100, 4, 0.5, 1)
        assert logistic_loss(np.zeros(4), X, y) == pytest.approx(math.log(2.0), rel=1e-15)

    def test_loss_vanishes_along_separating_ray(self):
        X, y, spec = _probit_data(200, 3, 1e-14, 2)
        losses = [logistic_loss(c * spec.beta_star, X, y) for c in (1.0, 10.0, 100.0, 1e4)]
        assert all(a > b for a, b in zip(losses, losses[1:]))
        assert losses[-1] < 1e-6

    def test_loss_survives_huge_margins(self):
        X = np.array([[1e300], [-1e300]])
        y = np.array([1.0, -1.0])
        assert logistic_loss(np.array([1e5]), X, y) == 0.0
        assert np.isinf(logistic_loss(np.array([-1e5]), X, y)) is np.True_ or (
            logistic_loss(np.array([-1e5]), X, y) > 1e300
        )

    def test_dimension_mismatch(self):
        X, y, _ = _probit_data(10, 3, 0.5, 3)
        with pytest.raises(ValueError):
            logistic_loss(np.zeros(4), X, y)
        with pytest.raises(ValueError):
            loss_gradient(np.zeros(2), X, y)

    def test_decomposition_identity(self):
        rng = np.random.default_rng(4)
        X, y, _ = _probit_data(300, 5, 0.5, 4)
        gamma = rng.standard_normal(5)
        b = bounded_term(gamma, X)
        u = unbounded_term(gamma, X, y)
        pointwise = np.logaddexp(0.0, -y * (X @ gamma))
        assert np.abs(b + u - pointwise).max() < 1e-12
        assert np.all(b > 0.0) and np.all(b <= math.log(2.0))
        assert np.all(u >= 0.0)

    def test_pointwise_values(self):
        gamma = np.array([1.0, 0.0])
        x = np.array([0.0, 5.0])
        assert bounded_term(gamma, x) == pytest.approx(math.log(2.0), rel=1e-15)
        assert unbounded_term(gamma, x, 1.0) == 0.0
        x2 = np.array([2.0, 0.0])
        assert unbounded_term(gamma, x2, -1.0) == 2.0
        assert bounded_term(gamma, x2) == pytest.approx(math.log(1 + math.exp(-2)), rel=1e-14)

    def test_gradient_at_zero_closed_form(self):
        X, y, _ = _probit_data(50, 4, 0.5, 5)
        expected = -(y[:, None] * X).mean(axis=0) / 2.0
        assert np.abs(loss_gradient(np.zeros(4), X, y) - expected).max() == 0.0

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(6)
        X, y, _ = _probit_data(50, 5, 0.5, 6)
        gamma = rng.standard_normal(5)
        g = loss_gradient(gamma, X, y)
        step = 1e-6
        fd = np.array(
            [
                (logistic_loss(gamma + step * e, X, y) - logistic_loss(gamma - step * e, X, y))
                / (2.0 * step)
                for e in np.eye(5)
            ]
        )
        assert np.abs(g - fd).max() / np.abs(g).max() <= 1e-6

    def test_gradient_cancels_on_label_symmetric_data(self):
        # every point duplicated with both labels, duplicates adjacent so the
        # sequential reduction cancels each pair exactly
        rng = np.random.default_rng(7)
        Xh = rng.standard_normal((20, 3))
        X = np.repeat(Xh, 2, axis=0)
        y = np.tile([1.0, -1.0], 20)
        assert np.abs(loss_gradient(np.zeros(3), X, y)).max() == 0.0


class TestFit:
    def test_separable_data_hits_boundary(self):
        X, y, _ = _probit_data(60, 3, 1e-14, 8)
        result = fit(X, y, FitConfig(M=5.0))
        assert result.boundary_active
        assert result.tau_hat == pytest.approx(5.0, rel=1e-9)

    def test_one_dimensional_matches_golden_section(self):
        X, y, _ = _probit_data(120, 1, 0.5, 9)
        M = 50.0
        result = fit(X, y, FitConfig(M=M))
        oracle = golden_section_min(
            lambda c: logistic_loss(np.array([c]), X, y), -M, M
        )
        assert abs(result.gamma_hat[0] - oracle) <= 1e-6

    def test_two_dimensional_beats_dense_grid(self):
        X, y, _ = _probit_data(30, 2, 0.5, 10)
        M = 10.0
        result = fit(X, y, FitConfig(M=M))
        grid = np.linspace(-M, M, 401)
        G1, G2 = np.meshgrid(grid, grid)
        pts = np.stack([G1.ravel(), G2.ravel()], axis=1)
        pts = pts[np.linalg.norm(pts, axis=1) <= M]
        margins = y[None, :] * (pts @ X.T)
        losses = np.logaddexp(0.0, -margins).mean(axis=1)
        assert result.loss <= float(losses.min()) + 1e-9

    def test_monotone_descent_history(self):
        X, y, _ = _probit_data(400, 5, 0.5, 11)
        result = fit(X, y, FitConfig(M=100.0), keep_history=True)
        hist = result.history
        assert hist is not None and len(hist) >= 2
        assert all(a >= b for a, b in zip(hist, hist[1:]))

    def test_interior_optimum_has_small_gradient(self):
        X, y, _ = _probit_data(2_000, 4, 0.5, 12)
        result = fit(X, y, FitConfig(M=1e3, tol=1e-9))
        assert result.converged
        assert not result.boundary_active
        assert float(np.linalg.norm(loss_gradient(result.gamma_hat, X, y))) <= 2e-9

    def test_label_and_design_sign_symmetry(self):
        X, y, _ = _probit_data(150, 3, 0.5, 13)
        cfg = FitConfig(M=20.0)
        base = fit(X, y, cfg).gamma_hat
        flipped_both = fit(-X, -y, cfg).gamma_hat
        assert np.array_equal(base, flipped_both)
        flipped_labels = fit(X, -y, cfg).gamma_hat
        assert np.abs(flipped_labels + base).max() <= 1e-6

    def test_orthogonal_equivariance(self):
        rng = np.random.default_rng(14)
        X, y, _ = _probit_data(200, 4, 0.5, 14)
        Q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
        cfg = FitConfig(M=30.0)
        base = fit(X, y, cfg).gamma_hat
        rotated = fit(X @ Q.T, y, cfg).gamma_hat
        assert np.abs(rotated - Q @ base).max() <= 1e-6

    def test_feasibility_of_result(self):
        for seed in range(15, 19):
            X, y, _ = _probit_data(80, 3, 0.2, seed)
            M = 2.0
            result = fit(X, y, FitConfig(M=M))
            assert result.tau_hat <= M * (1.0 + 1e-12)
            assert np.abs(result.beta_hat * result.tau_hat - result.gamma_hat).max() <= 1e-10

    def test_fixed_step_rule(self):
        X, y, _ = _probit_data(300, 3, 0.5, 19)
        result = fit(X, y, FitConfig(M=50.0, step_rule="fixed_inverse_lipschitz"))
        assert result.converged
        reference = fit(X, y, FitConfig(M=50.0))
        assert np.abs(result.gamma_hat - reference.gamma_hat).max() <= 1e-5

    def test_max_iter_reports_nonconvergence(self):
        X, y, _ = _probit_data(500, 4, 0.5, 20)
        result = fit(X, y, FitConfig(M=100.0, max_iter=3))
        assert not result.converged
        assert result.iterations == 3

    def test_infeasible_init_rejected(self):
        X, y, _ = _probit_data(50, 3, 0.5, 21)
        with pytest.raises(ValueError):
            fit(X, y, FitConfig(M=1.0), init=np.array([2.0, 0.0, 0.0]))

    def test_init_inside_ball_accepted(self):
        X, y, _ = _probit_data(50, 3, 0.5, 22)
        result = fit(X, y, FitConfig(M=5.0), init=np.array([0.5, 0.0, 0.0]))
        assert result.converged

    def test_nonfinite_loss_raises_with_iterate(self):
        X = np.array([[1e308], [1e308]])
        y = np.array([1.0, 1.0])
        with pytest.raises(SolverError) as err:
            fit(X, y, FitConfig(M=10.0), init=np.array([-10.0]))
        assert err.value.iterate is not None

    def test_decompose(self):
        result = FitResult(
            gamma_hat=np.array([3.0, 4.0]),
            tau_hat=5.0,
            beta_hat=np.array([0.6, 0.8]),
            loss=0.1,
            proj_grad_norm=0.0,
            iterations=1,
            converged=True,
            boundary_active=False,
        )
        tau, beta = decompose(result)
        assert tau == 5.0
        assert np.allclose(beta, [0.6, 0.8])

    def test_decompose_rejects_zero(self):
        result = FitResult(
            gamma_hat=np.zeros(2),
            tau_hat=0.0,
            beta_hat=np.zeros(2),
            loss=math.log(2.0),
            proj_grad_norm=0.0,
            iterations=1,
            converged=True,
            boundary_active=False,
        )
        with pytest.raises(DegenerateFitError):
            decompose(result)


class TestSkositLearnWrapper:
    def test_fit_predict_roundtrip(self):
        X, y, spec = _probit_data(500, 4, 0.3, 23)
        est = BallLogisticRegression(M=50.0).fit(X, y)
        pred = est.predict(X)
        assert set(np.unique(pred)) <= {-1.0, 1.0}
        assert (pred == y).mean() > 0.8
        assert est.tau_ == pytest.approx(np.linalg.norm(est.gamma_), rel=1e-12)

    def test_get_set_params_and_clone(self):
        est = BallLogisticRegression(M=7.0, tol=1e-6, max_iter=500)
        params = est.get_params()
        assert params["M"] == 7.0 and params["tol"] == 1e-6
        est2 = clone(est).set_params(M=9.0)
        assert est2.M == 9.0 and est2.tol == 1e-6

    def test_decision_function_matches_margins(self):
        X, y, _ = _probit_data(100, 3, 0.5, 24)
        est = BallLogisticRegression(M=20.0).fit(X, y)
        assert np.abs(est.decision_function(X) - X @ est.gamma_).max() < 1e-12

    def test_score_uses_accuracy(self):
        X, y, _ = _probit_data(400, 3, 0.2, 25)
        est = BallLogisticRegression(M=50.0).fit(X, y)
        assert est.score(X, y) == (est.predict(X) == y).mean()

    def test_feature_count_checked(self):
        X, y, _ = _probit_data(50, 3, 0.5, 26)
        est = BallLogisticRegression(M=5.0).fit(X, y)
        with pytest.raises(ValueError):
            est.predict(np.ones((2, 4)))

    def test_bad_labels_rejected(self):
        X = np.eye(3)
        with pytest.raises(ValueError):
            BallLogisticRegression(M=1.0).fit(X, np.array([0.0, 1.0, 1.0]))
