"""Path quantities versus dense products and explicit leave-one-out refits."""

import numpy as np
import pytest

from preval.errors import DimensionError, ParameterError
from preval.linalg import SvdFactors, compact_svd, ridge_closed_form_oracle
from preval.ridge_path import path_entry, precompute, press, prevalidated_predictions


def centered_instance(rng, n, p, k):
    X = rng.standard_normal((n, p))
    X -= X.mean(axis=0)
    labels = rng.integers(0, k, size=n)
    Y = np.where(labels[:, None] == np.arange(k), 1.0, -1.0)
    return X, Y


def loo_refit(X, Y, lam, i):
    """Oracle: refit the ridge solution without row i, predict row i."""
    keep = np.arange(X.shape[0]) != i
    beta = ridge_closed_form_oracle(X[keep], Y[keep], lam)
    return X[i] @ beta


class TestPrecompute:
    def test_identity_construction(self):
        svd = SvdFactors(U=np.eye(2), sigma=np.array([2.0, 1.0]), V=np.eye(2), r=2)
        R, Q = precompute(svd, np.eye(2))
        np.testing.assert_array_equal(R, np.diag([2.0, 1.0]))
        np.testing.assert_array_equal(Q, np.diag([2.0, 1.0]))

    def test_q_is_sigma_times_uty(self):
        rng = np.random.default_rng(0)
        X, Y = centered_instance(rng, 6, 4, 2)
        svd = compact_svd(X)
        _, Q = precompute(svd, Y)
        np.testing.assert_allclose(Q, svd.sigma[:, None] * (svd.U.T @ Y), atol=1e-12)

    def test_dense_products(self):
        rng = np.random.default_rng(1)
        X, Y = centered_instance(rng, 5, 3, 2)
        svd = compact_svd(X)
        R, Q = precompute(svd, Y)
        np.testing.assert_allclose(R, svd.U @ np.diag(svd.sigma), atol=1e-13)
        np.testing.assert_allclose(Q, (svd.U @ np.diag(svd.sigma)).T @ Y, atol=1e-13)

    def test_row_mismatch(self):
        svd = SvdFactors(U=np.eye(3), sigma=np.ones(3), V=np.eye(3), r=3)
        with pytest.raises(DimensionError):
            precompute(svd, np.ones((4, 2)))


class TestPathEntry:
    def test_heavy_regularization_limits(self):
        rng = np.random.default_rng(2)
        X, Y = centered_instance(rng, 10, 4, 2)
        svd = compact_svd(X)
        R, Q = precompute(svd, Y)
        entry = path_entry(R, Q, svd.sigma, Y, 1e12)
        assert np.abs(entry.fitted).max() < 1e-6
        assert np.abs(entry.leverage).max() < 1e-6
        np.testing.assert_allclose(entry.loo_residuals, Y, atol=1e-6)
        assert np.abs(entry.prevalidated).max() < 1e-6

    def test_leverage_saturation_stays_finite(self):
        # square invertible design at vanishing lambda: leverages approach 1
        # and the clamp keeps the LOO residuals finite
        rng = np.random.default_rng(3)
        n = 5
        X = rng.standard_normal((n, n)) + 3.0 * np.eye(n)
        Y = np.where(rng.random((n, 2)) > 0.5, 1.0, -1.0)
        svd = compact_svd(X)
        R, Q = precompute(svd, Y)
        entry = path_entry(R, Q, svd.sigma, Y, 1e-12)
        assert entry.leverage.max() > 0.999
        assert entry.leverage.max() < 1.0
        assert np.all(np.isfinite(entry.loo_residuals))
        assert np.all(np.isfinite(entry.prevalidated))

    def test_residual_identities(self):
        rng = np.random.default_rng(4)
        X, Y = centered_instance(rng, 9, 5, 3)
        svd = compact_svd(X)
        R, Q = precompute(svd, Y)
        entry = path_entry(R, Q, svd.sigma, Y, 0.5)
        np.testing.assert_array_equal(entry.residuals, Y - entry.fitted)
        np.testing.assert_array_equal(
            entry.prevalidated, entry.fitted - (entry.loo_residuals - entry.residuals)
        )
        assert np.all(entry.leverage >= 0)
        assert np.all(entry.leverage < 1)

    def test_loo_residuals_match_explicit_refits(self):
        rng = np.random.default_rng(5)
        X, Y = centered_instance(rng, 8, 3, 2)
        svd = compact_svd(X)
        R, Q = precompute(svd, Y)
        entry = path_entry(R, Q, svd.sigma, Y, 1.0)
        for i in range(8):
            pred_i = loo_refit(X, Y, 1.0, i)
            np.testing.assert_allclose(entry.loo_residuals[i], Y[i] - pred_i, atol=1e-8)

    def test_nonpositive_lambda_rejected(self):
        rng = np.random.default_rng(6)
        X, Y = centered_instance(rng, 6, 3, 2)
        svd = compact_svd(X)
        R, Q = precompute(svd, Y)
        for lam in (0.0, -1.0):
            with pytest.raises(ParameterError):
                path_entry(R, Q, svd.sigma, Y, lam)

    def test_hat_diagonal_matches_dense(self):
        rng = np.random.default_rng(7)
        X, Y = centered_instance(rng, 10, 6, 2)
        svd = compact_svd(X)
        R, Q = precompute(svd, Y)
        lam = 2.0
        H = X @ np.linalg.solve(X.T @ X + lam * np.eye(6), X.T)
        entry = path_entry(R, Q, svd.sigma, Y, lam)
        np.testing.assert_allclose(entry.leverage, np.diag(H), atol=1e-10)


class TestPrevalidatedPredictions:
    def test_zero_leverage_case(self):
        rng = np.random.default_rng(8)
        X, Y = centered_instance(rng, 6, 3, 2)
        svd = compact_svd(X)
        R, Q = precompute(svd, Y)
        entry = path_entry(R, Q, svd.sigma, Y, 1.0)
        zeroed = type(entry)(
            lam=entry.lam,
            coef_core=entry.coef_core,
            fitted=entry.fitted,
            residuals=entry.residuals,
            leverage=np.zeros_like(entry.leverage),
            loo_residuals=entry.residuals,
            prevalidated=entry.fitted,
        )
        np.testing.assert_array_equal(prevalidated_predictions(zeroed), zeroed.fitted)

    def test_single_row_arithmetic(self):
        # leverage 0.5, fit 0.4, target 1: loo residual 1.2, preval -0.2
        y, yhat, h = 1.0, 0.4, 0.5
        ehat = y - yhat
        etilde = ehat / (1.0 - h)
        assert etilde == pytest.approx(1.2)
        assert yhat - (etilde - ehat) == pytest.approx(-0.2)

    def test_rows_match_refit_predictions(self):
        rng = np.random.default_rng(9)
        X, Y = centered_instance(rng, 8, 3, 2)
        svd = compact_svd(X)
        R, Q = precompute(svd, Y)
        for lam in (0.1, 1.0, 10.0):
            entry = path_entry(R, Q, svd.sigma, Y, lam)
            preval = prevalidated_predictions(entry)
            for i in range(8):
                np.testing.assert_allclose(preval[i], loo_refit(X, Y, lam, i), atol=1e-8)


class TestPress:
    def test_zero_residuals(self):
        rng = np.random.default_rng(10)
        X, Y = centered_instance(rng, 6, 3, 2)
        svd = compact_svd(X)
        R, Q = precompute(svd, Y)
        entry = path_entry(R, Q, svd.sigma, Y, 1.0)
        zeroed = type(entry)(
            lam=entry.lam,
            coef_core=entry.coef_core,
            fitted=entry.fitted,
            residuals=entry.residuals,
            leverage=entry.leverage,
            loo_residuals=np.zeros_like(entry.loo_residuals),
            prevalidated=entry.prevalidated,
        )
        assert press(zeroed) == 0.0

    def test_heavy_regularization_limit(self):
        rng = np.random.default_rng(11)
        X, Y = centered_instance(rng, 10, 4, 3)
        svd = compact_svd(X)
        R, Q = precompute(svd, Y)
        entry = path_entry(R, Q, svd.sigma, Y, 1e12)
        np.testing.assert_allclose(press(entry), (Y**2).sum(), rtol=1e-6)

    def test_matches_brute_force_sum(self):
        rng = np.random.default_rng(12)
        X, Y = centered_instance(rng, 8, 3, 2)
        svd = compact_svd(X)
        R, Q = precompute(svd, Y)
        lam = 0.8
        entry = path_entry(R, Q, svd.sigma, Y, lam)
        brute = sum(
            ((Y[i] - loo_refit(X, Y, lam, i)) ** 2).sum() for i in range(8)
        )
        assert abs(press(entry) - brute) < 1e-7
