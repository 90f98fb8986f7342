"""Per-lambda ridge quantities from a single SVD: fits, leverages, shortcut
leave-one-out residuals, and prevalidated predictions.

With R = U @ diag(sigma) and Q = R.T @ Y computed once, every value of the
ridge parameter costs only elementwise work plus one n x r by r x k product:

    core          A    = Q / (sigma^2 + lam)          row-wise
    full fit      Yhat = R @ A
    residuals     Ehat = Y - Yhat
    leverages     h_i  = sum_j R[i,j]^2 / (sigma_j^2 + lam)
    LOO residuals Etilde = Ehat / (1 - h)             elementwise
    prevalidated  Ytilde = Yhat - (Etilde - Ehat)

Row i of Ytilde is the prediction at x_i of the ridge model fitted with row
i left out, so a scale parameter tuned against Ytilde is tuned against
predictions the model never trained on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ParameterError
from .linalg import SvdFactors

# floor for 1 - leverage; leverages reach 1 when lam -> 0 on a square
# invertible design, and the division must stay finite there
LEVERAGE_EPS = 1e-12


@dataclass(frozen=True)
class RidgePathEntry:
    """Everything the path computes for one ridge parameter.

    scale and preval_log_loss are filled in by the classifier after the
    scale fit; path_entry leaves them at their defaults.
    """

    lam: float
    coef_core: np.ndarray        # r x k, dual-space coefficients
    fitted: np.ndarray           # n x k, full-fit predictions
    residuals: np.ndarray        # n x k, full-fit residuals
    leverage: np.ndarray         # n, clamped to [0, 1 - 1e-12]
    loo_residuals: np.ndarray    # n x k, shortcut LOOCV residuals
    prevalidated: np.ndarray     # n x k, per-row held-out predictions
    scale: float = float("nan")
    preval_log_loss: float = float("nan")


def precompute(svd: SvdFactors, Y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """R = U @ diag(sigma) and Q = R.T @ Y, shared by every lambda."""
    Y = np.asarray(Y, dtype=np.float64)
    if Y.ndim != 2 or Y.shape[0] != svd.U.shape[0]:
        raise DimensionError(
            f"target rows {Y.shape[0] if Y.ndim == 2 else Y.shape} do not match "
            f"{svd.U.shape[0]} design rows"
        )
    R = svd.U * svd.sigma
    Q = R.T @ Y
    return R, Q


def path_entry(
    R: np.ndarray,
    Q: np.ndarray,
    sigma: np.ndarray,
    Y: np.ndarray,
    lam: float,
) -> RidgePathEntry:
    """All per-lambda quantities for one ridge parameter."""
    if not lam > 0:
        raise ParameterError(f"ridge parameter must be positive, got {lam}")
    shrink = sigma**2 + lam
    coef_core = Q / shrink[:, None]
    fitted = R @ coef_core
    residuals = Y - fitted
    leverage = (R**2 / shrink).sum(axis=1)
    leverage = np.clip(leverage, 0.0, 1.0 - LEVERAGE_EPS)
    loo_residuals = residuals / (1.0 - leverage)[:, None]
    prevalidated = fitted - (loo_residuals - residuals)
    return RidgePathEntry(
        lam=float(lam),
        coef_core=coef_core,
        fitted=fitted,
        residuals=residuals,
        leverage=leverage,
        loo_residuals=loo_residuals,
        prevalidated=prevalidated,
    )


def prevalidated_predictions(entry: RidgePathEntry) -> np.ndarray:
    """Per-row predictions of the model fitted without that row."""
    return entry.fitted - (entry.loo_residuals - entry.residuals)


def press(entry: RidgePathEntry) -> float:
    """Sum of squared LOOCV residuals over all rows and classes."""
    return float((entry.loo_residuals**2).sum())
