"""Request and response models for the classifier service."""

from __future__ import annotations

from pydantic import BaseModel, Field

from ..bench import METHODS


class LambdaGridSpec(BaseModel):
    """Log-equispaced ridge-parameter grid: count values from lo to hi."""

    lo: float = Field(..., gt=0)
    hi: float = Field(..., gt=0)
    count: int = Field(..., ge=1)


class FitRequest(BaseModel):
    data: str = Field(..., description="Path to a headered CSV on the server host")
    label: str = Field(..., description="Name of the label column")
    method: str = Field("preval", description=f"One of {', '.join(METHODS)}")
    out: str = Field(..., description="Where to write the model JSON")
    lambda_grid: LambdaGridSpec | None = None
    normalize: str = "zscore"
    seed: int = 0
    categorical_columns: list[str] = []


class PathEntryModel(BaseModel):
    lam: float
    scale: float | None
    log_loss: float
    press: float | None


class FitReportModel(BaseModel):
    entries: list[PathEntryModel]
    chosen: int
    criterion: str
    lambda_star: float
    c_star: float | None
    fit_seconds: float


class FitResponse(BaseModel):
    model_path: str
    method: str
    n: int
    p: int
    k: int
    report: FitReportModel


class EvalRequest(BaseModel):
    model: str = Field(..., description="Path to a model JSON")
    data: str = Field(..., description="Path to a headered CSV")
    label: str | None = Field(
        None, description="Label column; defaults to the one recorded in the model"
    )


class BenchReportModel(BaseModel):
    dataset: str
    method: str
    split: int | None
    zero_one_loss: float
    log_loss: float
    fit_seconds: float | None
    n: int
    p: int
    k: int


class BenchmarkRequest(BaseModel):
    data: str
    label: str
    methods: list[str] = list(METHODS)
    folds: int = Field(5, ge=2)
    seed: int = 0
    lambda_grid: LambdaGridSpec | None = None
    normalize: str = "zscore"
    include_timing: bool = True
    categorical_columns: list[str] = []


class BenchmarkResponse(BaseModel):
    reports: list[BenchReportModel]


class CurvePointModel(BaseModel):
    method: str
    n_train: int
    p: int
    zero_one_loss: float
    log_loss: float
    fit_seconds: float


class LearningCurveRequest(BaseModel):
    data: str
    label: str
    sizes: list[int]
    method: str = "preval"
    seed: int = 0
    eval_frac: float = Field(0.25, gt=0, lt=1)
    lambda_grid: LambdaGridSpec | None = None
    normalize: str = "zscore"
    categorical_columns: list[str] = []


class LearningCurveResponse(BaseModel):
    rows: list[CurvePointModel]


class PredictRequest(BaseModel):
    model: str = Field(..., description="Path to a model JSON")
    features: list[list[float]] = Field(..., description="Rows of feature values")


class PredictResponse(BaseModel):
    labels: list
    probabilities: list[list[float]]


class HealthResponse(BaseModel):
    status: str
    version: str
