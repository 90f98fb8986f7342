"""Dataset loading, encoding, normalization, splitting, and synthetic data.

Normalization statistics are always computed from training rows only and
then applied to evaluation rows, so nothing about the evaluation split can
leak into a fit.
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Sequence

import numpy as np

from .errors import DataError, DimensionError, ParameterError

ClassOrder = Literal["sorted", "appearance"]

KERNEL_SIZE = 9


@dataclass(frozen=True)
class RawDataset:
    """Parsed CSV: numeric feature matrix, label column, feature names."""

    X: np.ndarray
    labels: np.ndarray
    feature_names: list[str]


@dataclass(frozen=True)
class EncodedDataset:
    """Feature matrix with one-vs-rest {-1,+1} targets.

    Each target row carries exactly one +1 (the true class) and -1
    elsewhere. center/scale are present only if normalization statistics
    were baked in.
    """

    X: np.ndarray
    Y: np.ndarray
    labels: np.ndarray
    classes: np.ndarray
    center: np.ndarray | None = None
    scale: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    @property
    def k(self) -> int:
        return len(self.classes)


def encode_labels(
    labels: Sequence, order: ClassOrder = "sorted"
) -> tuple[np.ndarray, np.ndarray]:
    """Map raw labels to a {-1,+1} one-vs-rest matrix and class vocabulary."""
    labels = np.asarray(labels)
    if order == "sorted":
        classes = np.unique(labels)
    elif order == "appearance":
        _, first = np.unique(labels, return_index=True)
        classes = labels[np.sort(first)]
    else:
        raise ParameterError(f"unknown class order: {order!r}")
    if len(classes) < 2:
        raise DataError("need at least 2 distinct labels")
    index = {c: j for j, c in enumerate(classes)}
    Y = np.full((len(labels), len(classes)), -1.0)
    for i, lab in enumerate(labels):
        Y[i, index[lab]] = 1.0
    return Y, classes


def decode_labels(Y: np.ndarray, classes: np.ndarray) -> np.ndarray:
    """Inverse of encode_labels via per-row argmax."""
    return np.asarray(classes)[np.argmax(Y, axis=1)]


def load_csv(
    path: str | Path,
    label_column: str,
    categorical_columns: Sequence[str] = (),
) -> RawDataset:
    """Load a headered UTF-8 CSV into features and labels.

    Columns where every cell parses as a float become numeric features;
    all other columns are one-hot expanded, one indicator per level
    (levels sorted lexicographically). Numeric columns named in
    `categorical_columns` are one-hot expanded as well. Empty cells are
    rejected with their row and column, since missing-value handling is
    out of scope.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"empty CSV: {path}") from None
        rows = list(reader)
    if label_column not in header:
        raise DataError(f"label column {label_column!r} not found in {path}")
    if not rows:
        raise DataError(f"CSV has a header but no data rows: {path}")
    ncol = len(header)
    for i, row in enumerate(rows):
        if len(row) != ncol:
            raise DataError(f"row {i} has {len(row)} cells, expected {ncol}")
        for j, cell in enumerate(row):
            if cell == "":
                raise DataError(f"empty cell at row {i}, column {header[j]!r}")

    label_idx = header.index(label_column)
    labels = np.asarray([row[label_idx] for row in rows])

    columns: list[np.ndarray] = []
    names: list[str] = []
    forced = set(categorical_columns)
    for j, name in enumerate(header):
        if j == label_idx:
            continue
        cells = [row[j] for row in rows]
        numeric = name not in forced
        if numeric:
            try:
                values = np.asarray([float(c) for c in cells])
            except ValueError:
                numeric = False
        if numeric:
            columns.append(values)
            names.append(name)
        else:
            for level in sorted(set(cells)):
                columns.append(np.asarray([1.0 if c == level else 0.0 for c in cells]))
                names.append(f"{name}={level}")
    if not columns:
        raise DataError(f"no feature columns besides the label in {path}")
    return RawDataset(X=np.column_stack(columns), labels=labels, feature_names=names)


def zscore_fit_apply(
    X_train: np.ndarray, X_eval: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Standardize both matrices with the training mean and std.

    Standard deviations are floored at 1e-12, so a constant feature maps
    to zeros rather than NaN.
    """
    X_train = np.asarray(X_train, dtype=np.float64)
    X_eval = np.asarray(X_eval, dtype=np.float64)
    if X_train.shape[0] == 0:
        raise DataError("empty training matrix")
    mean = X_train.mean(axis=0)
    std = np.maximum(X_train.std(axis=0), 1e-12)
    return (X_train - mean) / std, (X_eval - mean) / std


def median_center(
    X_train: np.ndarray, X_eval: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Subtract the training per-feature median from both matrices.

    Even-length columns use the midpoint of the two middle values.
    """
    X_train = np.asarray(X_train, dtype=np.float64)
    X_eval = np.asarray(X_eval, dtype=np.float64)
    if X_train.shape[0] == 0:
        raise DataError("empty training matrix")
    med = np.median(X_train, axis=0)
    return X_train - med, X_eval - med


def stratified_kfold(labels: Sequence, k: int, seed: int = 0) -> np.ndarray:
    """Assign each row to one of k folds, stratified by label.

    Within each class the indices are shuffled (seeded) and dealt
    round-robin, so fold class counts differ by at most one.
    """
    labels = np.asarray(labels)
    if k < 2:
        raise ParameterError(f"need at least 2 folds, got {k}")
    rng = np.random.default_rng(seed)
    folds = np.full(len(labels), -1, dtype=np.int64)
    for cls in np.unique(labels):
        idx = np.flatnonzero(labels == cls)
        if len(idx) < k:
            raise DataError(
                f"class {cls!r} has {len(idx)} members, fewer than {k} folds"
            )
        rng.shuffle(idx)
        folds[idx] = np.arange(len(idx)) % k
    return folds


def random_conv_projection(images: np.ndarray, p: int, seed: int = 0) -> np.ndarray:
    """Project an image stack to p features via random 9x9 convolutions.

    Each feature applies one kernel with unit-normal weights and no bias:
    valid-mode convolution, ReLU, then global average pooling. Valid
    padding is a declared choice; it changes the feature values relative
    to padded variants.
    """
    images = np.asarray(images, dtype=np.float64)
    if images.ndim != 3:
        raise DimensionError(f"expected images of shape (n, H, W), got {images.shape}")
    n, H, W = images.shape
    if H < KERNEL_SIZE or W < KERNEL_SIZE:
        raise DataError(
            f"images of size {H}x{W} are smaller than the {KERNEL_SIZE}x{KERNEL_SIZE} kernel"
        )
    rng = np.random.default_rng(seed)
    kernels = rng.standard_normal((p, KERNEL_SIZE, KERNEL_SIZE))
    windows = np.lib.stride_tricks.sliding_window_view(
        images, (KERNEL_SIZE, KERNEL_SIZE), axis=(1, 2)
    )  # n x (H-8) x (W-8) x 9 x 9
    responses = np.tensordot(windows, kernels, axes=([3, 4], [1, 2]))
    np.maximum(responses, 0.0, out=responses)
    return responses.mean(axis=(1, 2))


def make_blobs(
    n: int,
    p: int,
    k: int,
    separation: float,
    seed: int = 0,
    order: ClassOrder = "sorted",
) -> EncodedDataset:
    """k unit-variance Gaussian clusters with centers `separation` from 0.

    Cluster centers are randomly-oriented unit directions scaled by
    `separation`; for k <= p the directions are orthonormalized so centers
    sit sqrt(2)*separation apart pairwise. separation 0 collapses all
    classes onto the origin. Label counts are balanced within one and row
    order is shuffled.
    """
    if k < 2:
        raise ParameterError(f"need at least 2 classes, got {k}")
    rng = np.random.default_rng(seed)
    directions = rng.standard_normal((k, p))
    if k <= p:
        directions, _ = np.linalg.qr(directions.T)
        directions = directions.T[:k]
    else:
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    centers = separation * directions
    labels = np.arange(n) % k
    perm = rng.permutation(n)
    labels = labels[perm]
    X = centers[labels] + rng.standard_normal((n, p))
    Y, classes = encode_labels(labels, order=order)
    return EncodedDataset(X=X, Y=Y, labels=labels, classes=classes)


_GRID_HEADER = struct.Struct("<3q")


def save_image_grid(path: str | Path, images: np.ndarray) -> None:
    """Write an (n, H, W) float64 stack in the raw little-endian format."""
    images = np.ascontiguousarray(images, dtype="<f8")
    if images.ndim != 3:
        raise DimensionError(f"expected images of shape (n, H, W), got {images.shape}")
    with Path(path).open("wb") as fh:
        fh.write(_GRID_HEADER.pack(*images.shape))
        fh.write(images.tobytes())


def load_image_grid(path: str | Path) -> np.ndarray:
    """Read the raw binary image-grid format.

    Layout: three little-endian int64 (n, H, W) followed by n*H*W
    little-endian float64 values in row-major order.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    raw = path.read_bytes()
    if len(raw) < _GRID_HEADER.size:
        raise DataError(f"image grid file too short: {path}")
    n, H, W = _GRID_HEADER.unpack_from(raw)
    if min(n, H, W) < 0:
        raise DataError(f"negative dimension in image grid header: {(n, H, W)}")
    expected = _GRID_HEADER.size + 8 * n * H * W
    if len(raw) != expected:
        raise DataError(
            f"image grid size mismatch: header implies {expected} bytes, file has {len(raw)}"
        )
    data = np.frombuffer(raw, dtype="<f8", offset=_GRID_HEADER.size)
    return data.reshape(n, H, W).astype(np.float64)
