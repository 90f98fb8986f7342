"""Comparison methods: penalized multinomial logistic regression with
internal cross-validation, and the two ridge scaling ablations.

The LR objective is the summed negative log-likelihood plus a ridge
penalty on the weights (intercepts unpenalized); the solver is L-BFGS-B
driving the analytic objective/gradient pair below. The ridge ablations
share the prevalidated classifier's path machinery and differ only in how
the logit scale is chosen: fixed at 1 ("ridge_raw", lambda by minimum
PRESS), or fitted on the unvalidated full-fit predictions ("ridge_naive",
lambda by minimum training log-loss).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize as scipy_minimize

from .classifier import (
    FitConfig,
    FitReport,
    PathSummary,
    PrevalModel,
    _apply_normalizer,
    _assemble_model,
    _fit_normalizer,
    prepare_design,
)
from .data import encode_labels, stratified_kfold
from .errors import DataError, DimensionError, NumericError
from .ridge_path import path_entry, press
from .scaling import PROB_FLOOR, log_loss, minimize_scale, softmax_rows


@dataclass(frozen=True)
class LrModel:
    """Multinomial logistic regression coefficients and metadata."""

    beta: np.ndarray             # p x k
    intercepts: np.ndarray       # k
    lam: float
    classes: np.ndarray
    feature_center: np.ndarray
    feature_scale: np.ndarray | None
    kind: str = "lr"

    @property
    def n_features(self) -> int:
        return self.beta.shape[0]

    @property
    def n_classes(self) -> int:
        return self.beta.shape[1]

    def predict_proba(self, X_new: np.ndarray) -> np.ndarray:
        return lr_predict_proba(self, X_new)

    def predict(self, X_new: np.ndarray) -> np.ndarray:
        P = lr_predict_proba(self, X_new)
        return self.classes[np.argmax(P, axis=1)]


def lr_objective_grad(
    beta: np.ndarray,
    intercepts: np.ndarray,
    X: np.ndarray,
    Y_onehot: np.ndarray,
    lam: float,
) -> tuple[float, tuple[np.ndarray, np.ndarray]]:
    """Summed NLL plus lam * ||beta||^2, with its analytic gradient.

    Intercepts are unpenalized. Returns (value, (grad_beta, grad_intercepts)).
    """
    if not (np.all(np.isfinite(beta)) and np.all(np.isfinite(intercepts))):
        raise NumericError("non-finite parameters in LR objective")
    P = softmax_rows(X @ beta + intercepts)
    p_true = (P * Y_onehot).sum(axis=1)
    value = float(-np.log(np.maximum(p_true, PROB_FLOOR)).sum() + lam * (beta**2).sum())
    diff = P - Y_onehot
    grad_beta = X.T @ diff + 2.0 * lam * beta
    grad_int = diff.sum(axis=0)
    return value, (grad_beta, grad_int)


def fit_lr(
    X: np.ndarray,
    y: Sequence,
    lam: float,
    max_iter: int = 100,
    normalize: str = "zscore",
    trace: list | None = None,
) -> LrModel:
    """Fit penalized multinomial LR at a fixed penalty via L-BFGS-B.

    Pass a list as `trace` to collect the objective value at every
    accepted iterate (the sequence is non-increasing).
    """
    X = np.asarray(X, dtype=np.float64)
    Y, classes = encode_labels(y)
    Y01 = (Y + 1.0) / 2.0
    center, scale = _fit_normalizer(X, normalize)
    Xc = _apply_normalizer(X, center, scale)
    n, p = Xc.shape
    k = len(classes)

    def flat_objective(w: np.ndarray) -> tuple[float, np.ndarray]:
        beta = w[: p * k].reshape(p, k)
        intercepts = w[p * k :]
        value, (g_beta, g_int) = lr_objective_grad(beta, intercepts, Xc, Y01, lam)
        return value, np.concatenate([g_beta.ravel(), g_int])

    w0 = np.zeros(p * k + k)
    callback: Callable | None = None
    if trace is not None:
        trace.append(flat_objective(w0)[0])
        callback = lambda wk: trace.append(flat_objective(wk)[0])  # noqa: E731
    result = scipy_minimize(
        flat_objective,
        w0,
        jac=True,
        method="L-BFGS-B",
        options={"maxiter": max_iter, "gtol": 1e-10, "ftol": 1e-14},
        callback=callback,
    )
    if not np.all(np.isfinite(result.x)):
        raise NumericError("LR solver diverged to non-finite parameters")
    beta = result.x[: p * k].reshape(p, k)
    intercepts = result.x[p * k :]
    return LrModel(
        beta=beta, intercepts=intercepts, lam=float(lam), classes=classes,
        feature_center=center, feature_scale=scale,
    )


def lr_predict_proba(model: LrModel, X_new: np.ndarray) -> np.ndarray:
    X_new = np.asarray(X_new, dtype=np.float64)
    if X_new.ndim != 2 or X_new.shape[1] != model.n_features:
        raise DimensionError(
            f"expected {model.n_features} feature columns, got shape {X_new.shape}"
        )
    Xc = _apply_normalizer(X_new, model.feature_center, model.feature_scale)
    return softmax_rows(Xc @ model.beta + model.intercepts)


def fit_lr_cv(
    X: np.ndarray,
    y: Sequence,
    grid: Sequence[float] = FitConfig().lambda_grid,
    k_folds: int = 5,
    seed: int = 0,
    max_iter: int = 100,
    normalize: str = "zscore",
    cv_trace: list | None = None,
) -> LrModel:
    """Choose the LR penalty by stratified k-fold CV log-loss, then refit.

    The CV score per grid value is the pooled mean NLL of every row
    predicted by the model that did not train on it. Ties break toward
    the larger (more regularized) penalty. Pass a list as `cv_trace` to
    collect (penalty, score) pairs.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    grid = sorted(float(l) for l in grid)
    folds = stratified_kfold(y, k_folds, seed=seed)
    best_lam = grid[0]
    best_score = np.inf
    for lam in grid:
        total_nll = 0.0
        for f in range(k_folds):
            train = folds != f
            val = ~train
            sub = fit_lr(X[train], y[train], lam, max_iter=max_iter, normalize=normalize)
            P = lr_predict_proba(sub, X[val])
            Y01 = _onehot_for(sub.classes, y[val])
            p_true = (P * Y01).sum(axis=1)
            total_nll += float(-np.log(np.maximum(p_true, PROB_FLOOR)).sum())
        score = total_nll / len(y)
        if cv_trace is not None:
            cv_trace.append((lam, score))
        if score <= best_score:
            best_lam, best_score = lam, score
    return fit_lr(X, y, best_lam, max_iter=max_iter, normalize=normalize)


def _onehot_for(classes: np.ndarray, labels: np.ndarray) -> np.ndarray:
    index = {c: j for j, c in enumerate(classes)}
    Y01 = np.zeros((len(labels), len(classes)))
    for i, lab in enumerate(labels):
        if lab not in index:
            raise DataError(f"label {lab!r} absent from the training fold")
        Y01[i, index[lab]] = 1.0
    return Y01


def fit_ridge_raw(
    X: np.ndarray, y: Sequence, config: FitConfig = FitConfig()
) -> tuple[PrevalModel, FitReport]:
    """Plain ridge classifier: lambda by minimum PRESS, scale fixed at 1.

    Probabilities are the raw regression scores squashed through softmax.
    """
    t0 = time.perf_counter()
    prep = prepare_design(X, y, config)
    summaries: list[PathSummary] = []
    best_idx, best_press, best_entry = -1, np.inf, None
    for i, lam in enumerate(prep.grid):
        entry = path_entry(prep.R, prep.Q, prep.svd.sigma, prep.Y, lam)
        entry_press = press(entry)
        preval_ll = log_loss(softmax_rows(entry.prevalidated), prep.Y01)
        summaries.append(
            PathSummary(lam=lam, scale=1.0, log_loss=preval_ll, press=entry_press)
        )
        if entry_press < best_press:
            best_idx, best_press = i, entry_press
            best_entry = entry
    assert best_entry is not None
    best_entry = replace(
        best_entry, scale=1.0, preval_log_loss=summaries[best_idx].log_loss
    )
    model = _assemble_model(prep, best_entry, kind="ridge_raw", keep_loocv=config.keep_loocv)
    report = FitReport(
        entries=tuple(summaries), chosen=best_idx, criterion="press",
        fit_seconds=time.perf_counter() - t0,
    )
    return model, report


def fit_ridge_naive(
    X: np.ndarray, y: Sequence, config: FitConfig = FitConfig()
) -> tuple[PrevalModel, FitReport]:
    """Ridge with the scale tuned on unvalidated full-fit predictions.

    For each lambda the scale minimizes training log-loss on the full-fit
    scores; the (lambda, scale) pair with the lowest training log-loss
    wins. Kept as a sensitivity baseline: tuning against predictions the
    model trained on overfits badly near the interpolation threshold.
    """
    t0 = time.perf_counter()
    prep = prepare_design(X, y, config)
    summaries: list[PathSummary] = []
    best_idx, best_loss, best_entry = -1, np.inf, None
    for i, lam in enumerate(prep.grid):
        entry = path_entry(prep.R, prep.Q, prep.svd.sigma, prep.Y, lam)
        sfr = minimize_scale(entry.fitted, prep.Y01)
        summaries.append(
            PathSummary(lam=lam, scale=sfr.c, log_loss=sfr.loss, press=press(entry))
        )
        if sfr.loss < best_loss:
            best_idx, best_loss = i, sfr.loss
            best_entry = entry
            best_scale = sfr.c
    assert best_entry is not None
    best_entry = replace(best_entry, scale=best_scale, preval_log_loss=best_loss)
    model = _assemble_model(prep, best_entry, kind="ridge_naive", keep_loocv=config.keep_loocv)
    report = FitReport(
        entries=tuple(summaries), chosen=best_idx, criterion="train_log_loss",
        fit_seconds=time.perf_counter() - t0,
    )
    return model, report


def lr_evaluate_log_loss(model: LrModel, X: np.ndarray, labels: Sequence) -> float:
    """Mean NLL of `labels` under an LR model."""
    P = lr_predict_proba(model, X)
    Y01 = _onehot_for(model.classes, np.asarray(labels))
    return log_loss(P, Y01)
