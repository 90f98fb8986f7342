"""FastAPI service exposing fit, eval, predict, benchmark, and curves.

The service wraps the core package over the host filesystem: requests
name CSV/model paths, responses carry metrics and reports. All handlers
are synchronous and stateless; concurrency within a benchmark run is
governed by PREVAL_THREADS in the service environment.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..bench import (
    BenchReport,
    evaluate,
    fit_method,
    model_proba,
    run_benchmark,
    run_learning_curve,
)
from ..classifier import FitConfig, FitReport
from ..data import load_csv
from ..errors import DataError, ParameterError, PrevalError
from ..serialize import load_model, model_to_dict
from . import schemas

_STATUS_BY_KIND = {"args": 400, "data": 422, "numeric": 422}


def _grid(spec: schemas.LambdaGridSpec | None) -> tuple[float, ...]:
    if spec is None:
        return FitConfig().lambda_grid
    return tuple(np.logspace(np.log10(spec.lo), np.log10(spec.hi), spec.count))


def _config(normalize: str, grid_spec: schemas.LambdaGridSpec | None) -> FitConfig:
    if normalize not in ("zscore", "mean", "median", "none"):
        raise ParameterError(f"unknown normalize policy: {normalize!r}")
    return FitConfig(lambda_grid=_grid(grid_spec), normalize=normalize)


def _report_model(report: FitReport, c_star: float | None) -> schemas.FitReportModel:
    return schemas.FitReportModel(
        entries=[
            schemas.PathEntryModel(
                lam=e.lam, scale=e.scale, log_loss=e.log_loss, press=e.press
            )
            for e in report.entries
        ],
        chosen=report.chosen,
        criterion=report.criterion,
        lambda_star=report.lambda_star,
        c_star=c_star,
        fit_seconds=report.fit_seconds,
    )


def _bench_model(r: BenchReport) -> schemas.BenchReportModel:
    return schemas.BenchReportModel(
        dataset=r.dataset, method=r.method, split=r.split,
        zero_one_loss=r.zero_one_loss, log_loss=r.log_loss,
        fit_seconds=r.fit_seconds, n=r.n, p=r.p, k=r.k,
    )


def create_app() -> FastAPI:
    app = FastAPI(title="preval", version=__version__)

    @app.exception_handler(PrevalError)
    async def preval_error(request: Request, exc: PrevalError) -> JSONResponse:
        status = _STATUS_BY_KIND.get(exc.kind, 500)
        return JSONResponse(
            status_code=status,
            content={"detail": {"kind": exc.kind, "message": str(exc)}},
        )

    @app.get("/health", response_model=schemas.HealthResponse)
    def health() -> schemas.HealthResponse:
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/fit", response_model=schemas.FitResponse)
    def fit_endpoint(req: schemas.FitRequest) -> schemas.FitResponse:
        raw = load_csv(req.data, req.label, categorical_columns=req.categorical_columns)
        config = _config(req.normalize, req.lambda_grid)
        model, report, seconds = fit_method(
            req.method, raw.X, raw.labels, config, seed=req.seed
        )
        doc = model_to_dict(model)
        doc["label_column"] = req.label
        Path(req.out).write_text(json.dumps(doc), encoding="utf-8")
        c_star = getattr(model, "c_star", None)
        return schemas.FitResponse(
            model_path=req.out,
            method=req.method,
            n=raw.X.shape[0],
            p=raw.X.shape[1],
            k=len(model.classes),
            report=_report_model(report, c_star),
        )

    @app.post("/eval", response_model=schemas.BenchReportModel)
    def eval_endpoint(req: schemas.EvalRequest) -> schemas.BenchReportModel:
        path = Path(req.model)
        if not path.exists():
            raise DataError(f"no such model file: {path}")
        doc = json.loads(path.read_text(encoding="utf-8"))
        label = req.label or doc.get("label_column")
        if label is None:
            raise DataError(
                "model file does not record a label column; pass one explicitly"
            )
        model = load_model(path)
        raw = load_csv(req.data, label)
        if raw.X.shape[1] != model.n_features:
            raise DataError(
                f"schema mismatch: model expects {model.n_features} features, "
                f"data provides {raw.X.shape[1]}"
            )
        zero_one, ll = evaluate(model, raw.X, raw.labels)
        return _bench_model(
            BenchReport(
                dataset=Path(req.data).stem,
                method=model.kind,
                split=None,
                zero_one_loss=zero_one,
                log_loss=ll,
                fit_seconds=None,
                n=raw.X.shape[0],
                p=raw.X.shape[1],
                k=len(model.classes),
            )
        )

    @app.post("/predict", response_model=schemas.PredictResponse)
    def predict_endpoint(req: schemas.PredictRequest) -> schemas.PredictResponse:
        model = load_model(req.model)
        X = np.asarray(req.features, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != model.n_features:
            raise DataError(
                f"schema mismatch: model expects {model.n_features} features, "
                f"request provides shape {X.shape}"
            )
        P = model_proba(model, X)
        labels = model.classes[np.argmax(P, axis=1)]
        return schemas.PredictResponse(
            labels=[l.item() if hasattr(l, "item") else l for l in labels],
            probabilities=P.tolist(),
        )

    @app.post("/benchmark", response_model=schemas.BenchmarkResponse)
    def benchmark_endpoint(req: schemas.BenchmarkRequest) -> schemas.BenchmarkResponse:
        raw = load_csv(req.data, req.label, categorical_columns=req.categorical_columns)
        config = _config(req.normalize, req.lambda_grid)
        reports = run_benchmark(
            raw.X,
            raw.labels,
            dataset=Path(req.data).stem,
            methods=req.methods,
            folds=req.folds,
            seed=req.seed,
            config=config,
            include_timing=req.include_timing,
        )
        return schemas.BenchmarkResponse(reports=[_bench_model(r) for r in reports])

    @app.post("/learning-curve", response_model=schemas.LearningCurveResponse)
    def learning_curve_endpoint(
        req: schemas.LearningCurveRequest,
    ) -> schemas.LearningCurveResponse:
        raw = load_csv(req.data, req.label, categorical_columns=req.categorical_columns)
        config = _config(req.normalize, req.lambda_grid)
        points = run_learning_curve(
            raw.X,
            raw.labels,
            sizes=req.sizes,
            method=req.method,
            seed=req.seed,
            eval_frac=req.eval_frac,
            config=config,
        )
        return schemas.LearningCurveResponse(
            rows=[
                schemas.CurvePointModel(
                    method=pt.method, n_train=pt.n_train, p=pt.p,
                    zero_one_loss=pt.zero_one_loss, log_loss=pt.log_loss,
                    fit_seconds=pt.fit_seconds,
                )
                for pt in points
            ]
        )

    return app


app = create_app()
