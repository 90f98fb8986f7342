"""Prevalidated ridge regression classifier and benchmark toolkit."""

__version__ = "0.1.0"

from .baselines import (
    LrModel,
    fit_lr,
    fit_lr_cv,
    fit_ridge_naive,
    fit_ridge_raw,
    lr_objective_grad,
    lr_predict_proba,
)
from .classifier import (
    FitConfig,
    FitReport,
    PrevalModel,
    fit,
    loocv_coefficients,
    predict,
    predict_proba,
)
from .data import (
    EncodedDataset,
    encode_labels,
    load_csv,
    load_image_grid,
    make_blobs,
    median_center,
    random_conv_projection,
    save_image_grid,
    stratified_kfold,
    zscore_fit_apply,
)
from .errors import DataError, DimensionError, NumericError, ParameterError, PrevalError
from .linalg import (
    GramMatrix,
    SvdFactors,
    accumulate_gram,
    compact_svd,
    ridge_closed_form_oracle,
    sym_eigendecomp,
)
from .ridge_path import RidgePathEntry, path_entry, precompute, press, prevalidated_predictions
from .scaling import ScaleFitResult, log_loss, minimize_scale, scaled_loss_and_grad, softmax_rows
from .serialize import load_model, model_from_dict, model_to_dict, save_model

__all__ = [
    "DataError",
    "DimensionError",
    "EncodedDataset",
    "FitConfig",
    "FitReport",
    "GramMatrix",
    "LrModel",
    "NumericError",
    "ParameterError",
    "PrevalError",
    "PrevalModel",
    "RidgePathEntry",
    "ScaleFitResult",
    "SvdFactors",
    "accumulate_gram",
    "compact_svd",
    "encode_labels",
    "fit",
    "fit_lr",
    "fit_lr_cv",
    "fit_ridge_naive",
    "fit_ridge_raw",
    "load_csv",
    "load_image_grid",
    "load_model",
    "log_loss",
    "loocv_coefficients",
    "lr_objective_grad",
    "lr_predict_proba",
    "make_blobs",
    "median_center",
    "minimize_scale",
    "model_from_dict",
    "model_to_dict",
    "path_entry",
    "precompute",
    "predict",
    "predict_proba",
    "press",
    "prevalidated_predictions",
    "random_conv_projection",
    "ridge_closed_form_oracle",
    "save_image_grid",
    "save_model",
    "scaled_loss_and_grad",
    "softmax_rows",
    "stratified_kfold",
    "sym_eigendecomp",
    "zscore_fit_apply",
]
