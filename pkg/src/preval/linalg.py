"""Dense symmetric eigendecomposition and compact SVD via Gram products.

The compact SVD of a centered design matrix X is built from the
eigendecomposition of whichever Gram product is smaller: X.T @ X (p x p)
when n >= p, or X @ X.T (n x n) when n < p. The missing factor is then
recovered by one multiplication with X, so the overall cost scales with
min(n, p). A direct closed-form ridge solve is included as a test oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Literal

import numpy as np

from .errors import DimensionError, NumericError, ParameterError

# Eigenvalues of a Gram matrix are squared singular values, so this is the
# square of a ~1e-5 singular-value cutoff.
DEFAULT_RANK_TOL = 1e-10

GramSide = Literal["features", "examples"]


@dataclass(frozen=True)
class GramMatrix:
    """Symmetric PSD matrix of accumulated inner products.

    side="features" holds X.T @ X (p x p); side="examples" holds
    X @ X.T (n x n).
    """

    side: GramSide
    values: np.ndarray

    def symmetry_error(self) -> float:
        """Relative asymmetry, expected to be ~0 (within 1e-12)."""
        scale = max(float(np.abs(self.values).max()), 1e-300)
        return float(np.abs(self.values - self.values.T).max()) / scale


@dataclass(frozen=True)
class SvdFactors:
    """Compact SVD U @ diag(sigma) @ V.T of a centered design matrix.

    sigma is strictly positive and descending; U is n x r, V is p x r,
    with orthonormal columns up to the accuracy of the Gram route.
    """

    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray
    r: int

    @property
    def n(self) -> int:
        return self.U.shape[0]

    @property
    def p(self) -> int:
        return self.V.shape[0]

    def reconstruct(self) -> np.ndarray:
        return (self.U * self.sigma) @ self.V.T


def accumulate_gram(rows: Iterable[np.ndarray], side: GramSide = "features") -> GramMatrix:
    """Accumulate a Gram matrix from a stream of row chunks.

    `rows` yields 1-D feature vectors or 2-D row blocks of equal width.
    For side="features" the p x p product is summed chunk by chunk in a
    single pass; for side="examples" the chunks are buffered and the
    n x n product formed at the end (every pair of rows is needed).
    The result is independent of how rows are chunked.
    """
    if side not in ("features", "examples"):
        raise ParameterError(f"unknown gram side: {side!r}")
    acc: np.ndarray | None = None
    buffered: list[np.ndarray] = []
    width: int | None = None
    for chunk in rows:
        block = np.atleast_2d(np.asarray(chunk, dtype=np.float64))
        if block.size == 0:
            continue
        if width is None:
            width = block.shape[1]
        elif block.shape[1] != width:
            raise DimensionError(
                f"inconsistent row length: expected {width}, got {block.shape[1]}"
            )
        if side == "features":
            update = block.T @ block
            acc = update if acc is None else acc + update
        else:
            buffered.append(block)
    if side == "features":
        if acc is None:
            raise DimensionError("empty row stream")
        return GramMatrix(side=side, values=acc)
    if not buffered:
        raise DimensionError("empty row stream")
    X = np.vstack(buffered)
    return GramMatrix(side=side, values=X @ X.T)


def sym_eigendecomp(
    S: GramMatrix | np.ndarray, rank_tol: float = DEFAULT_RANK_TOL
) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecompose a symmetric PSD matrix, descending, rank-truncated.

    Eigenvalues with value <= rank_tol * max_eigenvalue are discarded along
    with their vectors. Each retained eigenvector is sign-fixed so that its
    largest-magnitude component is positive, which keeps serialized models
    reproducible across runs.
    """
    values = S.values if isinstance(S, GramMatrix) else np.asarray(S, dtype=np.float64)
    if not np.all(np.isfinite(values)):
        raise NumericError("non-finite entries in symmetric matrix")
    w, Q = np.linalg.eigh(values)
    w = w[::-1]
    Q = Q[:, ::-1]
    if w.size == 0:
        return w, Q
    cutoff = rank_tol * max(float(w[0]), 0.0)
    keep = w > cutoff
    w = w[keep]
    Q = Q[:, keep]
    for j in range(Q.shape[1]):
        col = Q[:, j]
        if col[np.argmax(np.abs(col))] < 0:
            Q[:, j] = -col
    return w, Q


def compact_svd(
    X_centered: np.ndarray,
    rank_tol: float = DEFAULT_RANK_TOL,
    branch: Literal["auto", "features", "examples"] = "auto",
) -> SvdFactors:
    """Compact SVD of X via eigendecomposition of the smaller Gram product.

    branch="features" forces the X.T @ X route (the n >= p branch),
    branch="examples" forces X @ X.T; "auto" picks by shape. Exposed so
    tests can check that both routes agree.
    """
    X = np.asarray(X_centered, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionError(f"expected a 2-D design matrix, got ndim={X.ndim}")
    n, p = X.shape
    if branch == "auto":
        branch = "features" if n >= p else "examples"
    if branch == "features":
        gram = GramMatrix(side="features", values=X.T @ X)
        w, V = sym_eigendecomp(gram, rank_tol)
        # round-off can leave slightly negative eigenvalues; they are below
        # any positive cutoff already, but clamp defensively before sqrt
        sigma = np.sqrt(np.clip(w, 0.0, None))
        if sigma.size == 0:
            raise NumericError("degenerate input: design matrix has rank 0")
        U = X @ (V / sigma)
    else:
        gram = GramMatrix(side="examples", values=X @ X.T)
        w, U = sym_eigendecomp(gram, rank_tol)
        sigma = np.sqrt(np.clip(w, 0.0, None))
        if sigma.size == 0:
            raise NumericError("degenerate input: design matrix has rank 0")
        V = X.T @ (U / sigma)
    return SvdFactors(U=U, sigma=sigma, V=V, r=int(sigma.size))


def ridge_closed_form_oracle(X: np.ndarray, Y: np.ndarray, lam: float) -> np.ndarray:
    """Direct (X.T X + lam I)^-1 X.T Y solve. Test oracle only, O(p^3)."""
    if lam < 0:
        raise ParameterError(f"ridge parameter must be non-negative, got {lam}")
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    p = X.shape[1]
    try:
        return np.linalg.solve(X.T @ X + lam * np.eye(p), X.T @ Y)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"singular ridge system at lambda={lam}") from exc
