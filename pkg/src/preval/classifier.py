"""The prevalidated ridge classifier: lambda sweep, scale fit, prediction.

One SVD of the centered design feeds the whole ridge path. For each
candidate lambda the shortcut LOO machinery produces prevalidated
predictions, a scalar logit scale is fitted against them by minimizing
log-loss, and the (lambda, scale) pair with the lowest prevalidated
log-loss wins. Coefficients come back to feature space as

    beta = c_star * V @ A_star

where A_star is the winning dual-space core.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from typing import Literal, Sequence

import numpy as np

from .data import ClassOrder, encode_labels
from .errors import DataError, DimensionError, NumericError, ParameterError
from .linalg import DEFAULT_RANK_TOL, SvdFactors, compact_svd
from .ridge_path import RidgePathEntry, path_entry, precompute, press
from .scaling import log_loss, minimize_scale, softmax_rows

NormalizePolicy = Literal["zscore", "mean", "median", "none"]

DEFAULT_LAMBDA_GRID = tuple(np.logspace(-3.0, 3.0, 10))


@dataclass(frozen=True)
class FitConfig:
    """Knobs for the ridge-path fit.

    lambda_grid defaults to ten log-equispaced values spanning 1e-3..1e3.
    normalize picks the feature statistics baked into the model: "zscore"
    (mean and std), "mean", "median" (center only), or "none" (raw
    features, no intercept handling). keep_loocv retains the caches
    needed to reconstruct per-example leave-one-out models.
    """

    lambda_grid: Sequence[float] = DEFAULT_LAMBDA_GRID
    normalize: NormalizePolicy = "zscore"
    rank_tol: float = DEFAULT_RANK_TOL
    class_order: ClassOrder = "sorted"
    keep_loocv: bool = False


@dataclass(frozen=True)
class PrevalModel:
    """Fitted linear classifier with softmax probabilities.

    kind distinguishes the scale policy used at fit time: "preval"
    (scale fitted on prevalidated predictions), "ridge_raw" (scale fixed
    at 1), or "ridge_naive" (scale fitted on unvalidated predictions).
    The loocv_* fields are populated only when the fit kept them.
    """

    beta: np.ndarray             # p x k
    c_star: float
    lambda_star: float
    feature_center: np.ndarray   # p
    feature_scale: np.ndarray | None
    classes: np.ndarray
    kind: str = "preval"
    loocv_V: np.ndarray | None = None            # p x r
    loocv_A_star: np.ndarray | None = None       # r x k
    loocv_R_over: np.ndarray | None = None       # n x r, R / (sigma^2 + lambda_star)
    loocv_residuals: np.ndarray | None = None    # n x k

    @property
    def n_features(self) -> int:
        return self.beta.shape[0]

    @property
    def n_classes(self) -> int:
        return self.beta.shape[1]

    def predict_proba(self, X_new: np.ndarray) -> np.ndarray:
        return predict_proba(self, X_new)

    def predict(self, X_new: np.ndarray) -> np.ndarray:
        return predict(self, X_new)


@dataclass(frozen=True)
class PathSummary:
    lam: float
    scale: float | None
    log_loss: float
    press: float | None


@dataclass(frozen=True)
class FitReport:
    """Per-lambda diagnostics plus which entry was selected and why.

    criterion names the column that `chosen` minimizes:
    "preval_log_loss" for the prevalidated fit, "press" or
    "train_log_loss" for the sensitivity baselines. Equal values break
    toward smaller lambda.
    """

    entries: tuple[PathSummary, ...]
    chosen: int
    criterion: str
    fit_seconds: float

    @property
    def lambda_star(self) -> float:
        return self.entries[self.chosen].lam


def _fit_normalizer(
    X: np.ndarray, policy: NormalizePolicy
) -> tuple[np.ndarray, np.ndarray | None]:
    p = X.shape[1]
    if policy == "zscore":
        return X.mean(axis=0), np.maximum(X.std(axis=0), 1e-12)
    if policy == "mean":
        return X.mean(axis=0), None
    if policy == "median":
        return np.median(X, axis=0), None
    if policy == "none":
        return np.zeros(p), None
    raise ParameterError(f"unknown normalize policy: {policy!r}")


def _apply_normalizer(
    X: np.ndarray, center: np.ndarray, scale: np.ndarray | None
) -> np.ndarray:
    Xc = X - center
    if scale is not None:
        Xc = Xc / scale
    return Xc


@dataclass(frozen=True)
class PreparedFit:
    """Shared state between the prevalidated fit and the ridge baselines."""

    Xc: np.ndarray
    Y: np.ndarray                # n x k in {-1,+1}
    Y01: np.ndarray              # n x k one-hot
    classes: np.ndarray
    center: np.ndarray
    scale: np.ndarray | None
    svd: SvdFactors
    R: np.ndarray
    Q: np.ndarray
    grid: tuple[float, ...]


def prepare_design(X: np.ndarray, y: Sequence, config: FitConfig) -> PreparedFit:
    """Validate, normalize, encode, factorize, and precompute R and Q."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionError(f"expected a 2-D feature matrix, got ndim={X.ndim}")
    if X.shape[0] < 2:
        raise DataError(f"need at least 2 rows, got {X.shape[0]}")
    if not np.all(np.isfinite(X)):
        raise NumericError("non-finite feature values")
    grid = tuple(sorted(float(l) for l in config.lambda_grid))
    if not grid:
        raise ParameterError("empty lambda grid")
    if grid[0] <= 0:
        raise ParameterError(f"lambda grid must be positive, got {grid[0]}")
    y = np.asarray(y)
    if len(y) != X.shape[0]:
        raise DimensionError(f"{len(y)} labels for {X.shape[0]} rows")
    Y, classes = encode_labels(y, order=config.class_order)
    center, scale = _fit_normalizer(X, config.normalize)
    Xc = _apply_normalizer(X, center, scale)
    svd = compact_svd(Xc, rank_tol=config.rank_tol)
    R, Q = precompute(svd, Y)
    return PreparedFit(
        Xc=Xc, Y=Y, Y01=(Y + 1.0) / 2.0, classes=classes,
        center=center, scale=scale, svd=svd, R=R, Q=Q, grid=grid,
    )


def fit(
    X: np.ndarray, y: Sequence, config: FitConfig = FitConfig()
) -> tuple[PrevalModel, FitReport]:
    """Fit the prevalidated ridge classifier.

    Sweeps the lambda grid in ascending order; for each lambda, fits the
    logit scale on the prevalidated predictions and keeps the pair with
    the smallest prevalidated log-loss (ties go to the smaller lambda,
    via strict improvement over an ascending sweep).
    """
    t0 = time.perf_counter()
    prep = prepare_design(X, y, config)
    summaries: list[PathSummary] = []
    best_idx = -1
    best_loss = np.inf
    best_entry: RidgePathEntry | None = None
    for i, lam in enumerate(prep.grid):
        entry = path_entry(prep.R, prep.Q, prep.svd.sigma, prep.Y, lam)
        sfr = minimize_scale(entry.prevalidated, prep.Y01)
        summaries.append(
            PathSummary(lam=lam, scale=sfr.c, log_loss=sfr.loss, press=press(entry))
        )
        if sfr.loss < best_loss:
            best_idx, best_loss = i, sfr.loss
            best_entry = replace(entry, scale=sfr.c, preval_log_loss=sfr.loss)
    assert best_entry is not None
    model = _assemble_model(prep, best_entry, kind="preval", keep_loocv=config.keep_loocv)
    report = FitReport(
        entries=tuple(summaries),
        chosen=best_idx,
        criterion="preval_log_loss",
        fit_seconds=time.perf_counter() - t0,
    )
    return model, report


def _assemble_model(
    prep: PreparedFit, entry: RidgePathEntry, kind: str, keep_loocv: bool
) -> PrevalModel:
    beta = entry.scale * (prep.svd.V @ entry.coef_core)
    caches: dict = {}
    if keep_loocv:
        caches = dict(
            loocv_V=prep.svd.V,
            loocv_A_star=entry.coef_core,
            loocv_R_over=prep.R / (prep.svd.sigma**2 + entry.lam),
            loocv_residuals=entry.loo_residuals,
        )
    return PrevalModel(
        beta=beta,
        c_star=float(entry.scale),
        lambda_star=float(entry.lam),
        feature_center=prep.center,
        feature_scale=prep.scale,
        classes=prep.classes,
        kind=kind,
        **caches,
    )


def decision_scores(model: PrevalModel, X_new: np.ndarray) -> np.ndarray:
    """Pre-softmax logits (X_new - center) [/ scale] @ beta."""
    X_new = np.asarray(X_new, dtype=np.float64)
    if X_new.ndim != 2 or X_new.shape[1] != model.n_features:
        raise DimensionError(
            f"expected {model.n_features} feature columns, got shape {X_new.shape}"
        )
    Xc = _apply_normalizer(X_new, model.feature_center, model.feature_scale)
    return Xc @ model.beta


def predict_proba(model: PrevalModel, X_new: np.ndarray) -> np.ndarray:
    """Class probabilities; rows sum to one."""
    return softmax_rows(decision_scores(model, X_new))


def predict(model: PrevalModel, X_new: np.ndarray) -> np.ndarray:
    """Class labels via per-row argmax, ties to the lowest class index."""
    P = predict_proba(model, X_new)
    return model.classes[np.argmax(P, axis=1)]


def loocv_coefficients(model: PrevalModel, i: int) -> np.ndarray:
    """Coefficients of the leave-one-out model that excluded row i.

    Requires a model fitted with keep_loocv=True. The dual core of the
    model without row i is the full core minus a rank-one update built
    from the cached shrunk row and its LOO residual row.
    """
    if (
        model.loocv_V is None
        or model.loocv_A_star is None
        or model.loocv_R_over is None
        or model.loocv_residuals is None
    ):
        raise ParameterError("model was fitted without keep_loocv; caches absent")
    n = model.loocv_R_over.shape[0]
    if not 0 <= i < n:
        raise ParameterError(f"row index {i} out of range for {n} training rows")
    A_i = model.loocv_A_star - np.outer(model.loocv_R_over[i], model.loocv_residuals[i])
    return model.c_star * (model.loocv_V @ A_i)


def evaluate_log_loss(model: PrevalModel, X: np.ndarray, labels: Sequence) -> float:
    """Mean negative log-likelihood of `labels` under the model."""
    Y01 = _labels_to_onehot(model, labels)
    return log_loss(predict_proba(model, X), Y01)


def _labels_to_onehot(model: PrevalModel, labels: Sequence) -> np.ndarray:
    labels = np.asarray(labels)
    index = {c: j for j, c in enumerate(model.classes)}
    Y01 = np.zeros((len(labels), model.n_classes))
    for i, lab in enumerate(labels):
        if lab not in index:
            raise DataError(f"label {lab!r} not in the model's class vocabulary")
        Y01[i, index[lab]] = 1.0
    return Y01
