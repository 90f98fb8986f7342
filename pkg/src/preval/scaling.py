"""Softmax, multinomial log-loss, and the one-dimensional logit-scale fit.

The scale fit finds the scalar c minimizing the mean negative log-likelihood
of softmax(c * Z) against one-hot targets. As a log-sum-exp of functions
affine in c, the objective is convex, so a Newton step safeguarded by
bisection on a gradient-sign bracket converges fast and deterministically.
Both derivatives are analytic:

    loss'(c)  = mean_i (p_i - y_i) . z_i
    loss''(c) = mean_i [ sum_j p_ij z_ij^2 - (sum_j p_ij z_ij)^2 ]  >= 0
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericError, ParameterError

PROB_FLOOR = 1e-300
GRAD_TOL = 1e-10
LOSS_TOL = 1e-12
MAX_ITER = 200


@dataclass(frozen=True)
class ScaleFitResult:
    c: float
    loss: float
    iterations: int
    converged: bool
    degenerate: bool = False


def softmax_rows(Z: np.ndarray) -> np.ndarray:
    """Row-wise softmax with the row maximum subtracted for stability."""
    Z = np.asarray(Z, dtype=np.float64)
    if not np.all(np.isfinite(Z)):
        raise NumericError("non-finite logits")
    shifted = Z - Z.max(axis=-1, keepdims=True)
    expz = np.exp(shifted)
    return expz / expz.sum(axis=-1, keepdims=True)


def log_loss(P: np.ndarray, Y_onehot: np.ndarray) -> float:
    """Mean negative log-likelihood of the true class.

    Probabilities are floored at 1e-300 before the log so that a prediction
    of exactly zero on the true class yields a large finite loss.
    """
    P = np.asarray(P, dtype=np.float64)
    Y = np.asarray(Y_onehot)
    _check_onehot(Y)
    p_true = (P * Y).sum(axis=-1)
    return float(-np.mean(np.log(np.maximum(p_true, PROB_FLOOR))))


def _check_onehot(Y: np.ndarray) -> None:
    if Y.ndim != 2:
        raise ParameterError("one-hot target matrix must be 2-D")
    ones = np.count_nonzero(Y == 1, axis=1)
    others = np.count_nonzero((Y != 0) & (Y != 1))
    if others or not np.all(ones == 1):
        raise ParameterError("each one-hot row must contain exactly one 1 and zeros elsewhere")


def scaled_loss_and_grad(
    c: float, Z: np.ndarray, Y_onehot: np.ndarray
) -> tuple[float, float]:
    """Loss and d(loss)/dc of the scaled-logit objective at scale c."""
    if not np.isfinite(c):
        raise NumericError(f"non-finite scale: {c}")
    Z = np.asarray(Z, dtype=np.float64)
    Y = np.asarray(Y_onehot, dtype=np.float64)
    _check_onehot(Y)
    P = softmax_rows(c * Z)
    loss = float(-np.mean(np.log(np.maximum((P * Y).sum(axis=1), PROB_FLOOR))))
    grad = float(((P - Y) * Z).sum() / Z.shape[0])
    return loss, grad


def _loss_grad_curv(c: float, Z: np.ndarray, Y: np.ndarray) -> tuple[float, float, float]:
    P = softmax_rows(c * Z)
    loss = float(-np.mean(np.log(np.maximum((P * Y).sum(axis=1), PROB_FLOOR))))
    grad = float(((P - Y) * Z).sum() / Z.shape[0])
    mean_z = (P * Z).sum(axis=1)
    curv = float(np.mean((P * Z * Z).sum(axis=1) - mean_z**2))
    return loss, grad, curv


def minimize_scale(
    Z: np.ndarray, Y_onehot: np.ndarray, c_init: float = 1.0
) -> ScaleFitResult:
    """Minimize the convex scaled-logit log-loss over the scalar c.

    Unconstrained in sign. Converges when |gradient| <= 1e-10 or the
    relative loss change drops below 1e-12, capped at 200 iterations.
    An identically-zero Z makes every c equivalent; that case returns
    c_init with the degenerate flag set.
    """
    Z = np.asarray(Z, dtype=np.float64)
    Y = np.asarray(Y_onehot, dtype=np.float64)
    _check_onehot(Y)
    if Z.shape != Y.shape:
        raise ParameterError(f"logits {Z.shape} and targets {Y.shape} differ in shape")
    k = Z.shape[1]
    if not np.any(Z):
        return ScaleFitResult(
            c=float(c_init), loss=float(np.log(k)), iterations=0,
            converged=True, degenerate=True,
        )

    c = float(c_init)
    loss, grad, curv = _loss_grad_curv(c, Z, Y)
    # convexity means the gradient is nondecreasing in c: expand a bracket
    # [lo, hi] with grad(lo) <= 0 <= grad(hi) when one exists
    lo, hi = -np.inf, np.inf
    iterations = 0
    converged = False
    for iterations in range(1, MAX_ITER + 1):
        if abs(grad) <= GRAD_TOL:
            converged = True
            break
        if grad > 0:
            hi = min(hi, c)
        else:
            lo = max(lo, c)
        if curv > 0:
            step = -grad / curv
            candidate = c + step
        else:
            candidate = np.inf  # force the safeguard
        if not (lo < candidate < hi):
            if np.isfinite(lo) and np.isfinite(hi):
                candidate = 0.5 * (lo + hi)
            elif np.isfinite(lo):
                candidate = lo + max(1.0, 2.0 * abs(lo))  # expand right
            else:
                candidate = hi - max(1.0, 2.0 * abs(hi))  # expand left
        new_loss, new_grad, new_curv = _loss_grad_curv(candidate, Z, Y)
        rel_change = abs(new_loss - loss) / max(1.0, abs(loss))
        c, loss, grad, curv = candidate, new_loss, new_grad, new_curv
        if rel_change <= LOSS_TOL:
            # a loss plateau only counts as converged if the gradient is
            # genuinely small relative to the loss scale
            converged = abs(grad) <= max(GRAD_TOL, 1e-8 * max(1.0, abs(loss)))
            if converged:
                break
    if converged and curv > 0:
        # polish: Newton is quadratic at the optimum, so two more steps pin
        # c to machine precision and decouple downstream coefficients from
        # the stopping tolerance
        for _ in range(2):
            c_next = c - grad / curv
            if not np.isfinite(c_next):
                break
            next_loss, next_grad, next_curv = _loss_grad_curv(c_next, Z, Y)
            if next_loss > loss * (1.0 + 1e-12) + 1e-300:
                break
            c, loss, grad, curv = c_next, next_loss, next_grad, next_curv
            if grad == 0.0 or curv <= 0.0:
                break
    return ScaleFitResult(
        c=c, loss=loss, iterations=iterations, converged=converged
    )
