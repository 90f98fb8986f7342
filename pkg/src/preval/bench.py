"""Benchmark and learning-curve engines shared by the service and tests.

Every metric emitted here is recomputable from the serialized model and
the data: fits are timed with perf_counter around the fit call only, and
evaluation happens outside the timed section. (method, fold) tasks run
serially by default; set PREVAL_THREADS to parallelize them in a thread
pool. Results are always collected in task order, so output is
deterministic either way.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .baselines import LrModel, fit_lr_cv, fit_ridge_naive, fit_ridge_raw, lr_predict_proba
from .classifier import FitConfig, FitReport, PathSummary, PrevalModel, fit, predict_proba
from .data import stratified_kfold
from .errors import DataError, ParameterError
from .scaling import log_loss

METHODS = ("preval", "lr", "ridge_raw", "ridge_naive")

Model = PrevalModel | LrModel


@dataclass(frozen=True)
class BenchReport:
    """Held-out metrics for one (method, split)."""

    dataset: str
    method: str
    split: int | None
    zero_one_loss: float
    log_loss: float
    fit_seconds: float | None
    n: int
    p: int
    k: int


@dataclass(frozen=True)
class CurvePoint:
    """One learning-curve row."""

    method: str
    n_train: int
    p: int
    zero_one_loss: float
    log_loss: float
    fit_seconds: float


def max_workers() -> int:
    """Worker cap for benchmark task pools, from PREVAL_THREADS (default 1)."""
    raw = os.environ.get("PREVAL_THREADS", "1")
    try:
        value = int(raw)
    except ValueError:
        raise ParameterError(f"PREVAL_THREADS must be an integer, got {raw!r}") from None
    return max(1, value)


def fit_method(
    method: str,
    X: np.ndarray,
    y: np.ndarray,
    config: FitConfig,
    seed: int = 0,
    lr_max_iter: int = 100,
    lr_folds: int = 5,
) -> tuple[Model, FitReport, float]:
    """Fit one method and return (model, report, fit_seconds)."""
    if method == "preval":
        t0 = time.perf_counter()
        model, report = fit(X, y, config)
        return model, report, time.perf_counter() - t0
    if method == "ridge_raw":
        t0 = time.perf_counter()
        model, report = fit_ridge_raw(X, y, config)
        return model, report, time.perf_counter() - t0
    if method == "ridge_naive":
        t0 = time.perf_counter()
        model, report = fit_ridge_naive(X, y, config)
        return model, report, time.perf_counter() - t0
    if method == "lr":
        trace: list[tuple[float, float]] = []
        t0 = time.perf_counter()
        model = fit_lr_cv(
            X, y, grid=config.lambda_grid, k_folds=lr_folds, seed=seed,
            max_iter=lr_max_iter, normalize=config.normalize, cv_trace=trace,
        )
        seconds = time.perf_counter() - t0
        entries = tuple(
            PathSummary(lam=lam, scale=None, log_loss=score, press=None)
            for lam, score in trace
        )
        chosen = next(i for i, (lam, _) in enumerate(trace) if lam == model.lam)
        report = FitReport(
            entries=entries, chosen=chosen, criterion="cv_log_loss",
            fit_seconds=seconds,
        )
        return model, report, seconds
    raise ParameterError(f"unknown method {method!r}; expected one of {METHODS}")


def model_proba(model: Model, X: np.ndarray) -> np.ndarray:
    if isinstance(model, LrModel):
        return lr_predict_proba(model, X)
    return predict_proba(model, X)


def evaluate(model: Model, X: np.ndarray, labels: Sequence) -> tuple[float, float]:
    """(zero-one loss, mean log-loss) of a fitted model on labeled data."""
    labels = np.asarray(labels)
    P = model_proba(model, np.asarray(X, dtype=np.float64))
    predicted = model.classes[np.argmax(P, axis=1)]
    zero_one = float(np.mean(predicted != labels))
    index = {c: j for j, c in enumerate(model.classes)}
    Y01 = np.zeros_like(P)
    for i, lab in enumerate(labels):
        if lab not in index:
            raise DataError(f"label {lab!r} not in the model's class vocabulary")
        Y01[i, index[lab]] = 1.0
    return zero_one, log_loss(P, Y01)


def run_benchmark(
    X: np.ndarray,
    labels: np.ndarray,
    dataset: str,
    methods: Sequence[str] = METHODS,
    folds: int = 5,
    seed: int = 0,
    config: FitConfig = FitConfig(),
    include_timing: bool = True,
) -> list[BenchReport]:
    """Stratified k-fold benchmark: one report per (method, fold)."""
    X = np.asarray(X, dtype=np.float64)
    labels = np.asarray(labels)
    for method in methods:
        if method not in METHODS:
            raise ParameterError(f"unknown method {method!r}; expected one of {METHODS}")
    assignments = stratified_kfold(labels, folds, seed=seed)
    k = len(np.unique(labels))

    def task(method: str, split: int) -> BenchReport:
        train = assignments != split
        evl = ~train
        model, _, seconds = fit_method(method, X[train], labels[train], config, seed=seed)
        zero_one, ll = evaluate(model, X[evl], labels[evl])
        return BenchReport(
            dataset=dataset,
            method=method,
            split=split,
            zero_one_loss=zero_one,
            log_loss=ll,
            fit_seconds=seconds if include_timing else None,
            n=int(train.sum()),
            p=X.shape[1],
            k=k,
        )

    jobs = [(method, split) for method in methods for split in range(folds)]
    workers = max_workers()
    if workers == 1:
        return [task(*job) for job in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(task, *job) for job in jobs]
        return [f.result() for f in futures]


def interleaved_class_order(labels: np.ndarray, seed: int = 0) -> np.ndarray:
    """Index order that keeps every prefix close to class-balanced.

    Per-class index lists are shuffled (seeded), then dealt one element per
    class in rotation, so nested prefixes of the order stay stratified.
    """
    labels = np.asarray(labels)
    rng = np.random.default_rng(seed)
    per_class = []
    for cls in np.unique(labels):
        idx = np.flatnonzero(labels == cls)
        rng.shuffle(idx)
        per_class.append(list(idx))
    order: list[int] = []
    position = 0
    while len(order) < len(labels):
        chunk = per_class[position % len(per_class)]
        if chunk:
            order.append(chunk.pop())
        position += 1
    return np.asarray(order, dtype=np.int64)


def stratified_holdout(
    labels: np.ndarray, eval_frac: float, seed: int = 0
) -> tuple[np.ndarray, np.ndarray]:
    """Split indices into (train_pool, eval) stratified by class."""
    if not 0.0 < eval_frac < 1.0:
        raise ParameterError(f"eval fraction must be in (0, 1), got {eval_frac}")
    labels = np.asarray(labels)
    rng = np.random.default_rng(seed)
    train_idx: list[np.ndarray] = []
    eval_idx: list[np.ndarray] = []
    for cls in np.unique(labels):
        idx = np.flatnonzero(labels == cls)
        rng.shuffle(idx)
        n_eval = max(1, int(round(eval_frac * len(idx))))
        if n_eval >= len(idx):
            raise DataError(f"class {cls!r} too small for eval fraction {eval_frac}")
        eval_idx.append(idx[:n_eval])
        train_idx.append(idx[n_eval:])
    return np.concatenate(train_idx), np.concatenate(eval_idx)


def run_learning_curve(
    X: np.ndarray,
    labels: np.ndarray,
    sizes: Sequence[int],
    method: str = "preval",
    seed: int = 0,
    eval_frac: float = 0.25,
    config: FitConfig = FitConfig(),
) -> list[CurvePoint]:
    """Metrics along nested training subsets against one fixed eval split.

    The training pool is ordered by interleaved_class_order, so each
    requested size is a prefix of the next: subsets are nested and stay
    approximately stratified.
    """
    X = np.asarray(X, dtype=np.float64)
    labels = np.asarray(labels)
    sizes = sorted(int(s) for s in sizes)
    if sizes and sizes[0] < 2:
        raise ParameterError(f"training sizes must be at least 2, got {sizes[0]}")
    pool_idx, eval_idx = stratified_holdout(labels, eval_frac, seed=seed)
    pool_idx = pool_idx[interleaved_class_order(labels[pool_idx], seed=seed)]
    if sizes and sizes[-1] > len(pool_idx):
        raise DataError(
            f"training size {sizes[-1]} exceeds the {len(pool_idx)} rows available"
        )
    X_eval, y_eval = X[eval_idx], labels[eval_idx]
    points: list[CurvePoint] = []
    for size in sizes:
        subset = pool_idx[:size]
        model, _, seconds = fit_method(method, X[subset], labels[subset], config, seed=seed)
        zero_one, ll = evaluate(model, X_eval, y_eval)
        points.append(
            CurvePoint(
                method=method,
                n_train=size,
                p=X.shape[1],
                zero_one_loss=zero_one,
                log_loss=ll,
                fit_seconds=seconds,
            )
        )
    return points
