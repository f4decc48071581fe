"""Normalized kernels (cosine, Gaussian) and their Gram matrices.

Embedding sets are plain ``(n, d)`` float64 arrays; :func:`as_embeddings`
is the single validation gate every public entry point goes through.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial.distance import cdist, pdist, squareform

from .errors import DimensionMismatch, InvalidParams, NonFiniteValue, ZeroNormVector

COSINE = "cosine"
GAUSSIAN = "gaussian"

# rows with a smaller Euclidean norm cannot be cosine-normalized
MIN_ROW_NORM = 1e-12


@dataclass(frozen=True)
class KernelSpec:
    """Which similarity function to use.

    ``sigma`` is the Gaussian bandwidth, in embedding-space units, and must
    be ``None`` for the cosine kernel.
    """

    kind: str
    sigma: Optional[float] = None

    def __post_init__(self):
        kind = str(self.kind).lower()
        object.__setattr__(self, "kind", kind)
        if kind == GAUSSIAN:
            if self.sigma is None:
                raise InvalidParams("gaussian kernel requires a bandwidth sigma")
            sigma = float(self.sigma)
            if not np.isfinite(sigma) or sigma <= 0:
                raise InvalidParams(f"sigma must be a positive finite number, got {self.sigma!r}")
            object.__setattr__(self, "sigma", sigma)
        elif kind == COSINE:
            if self.sigma is not None:
                raise InvalidParams("cosine kernel takes no bandwidth")
        else:
            raise InvalidParams(f"unknown kernel kind {self.kind!r}; expected 'cosine' or 'gaussian'")

    @classmethod
    def cosine(cls) -> "KernelSpec":
        return cls(COSINE)

    @classmethod
    def gaussian(cls, sigma: float) -> "KernelSpec":
        return cls(GAUSSIAN, sigma)

    @property
    def is_gaussian(self) -> bool:
        return self.kind == GAUSSIAN

    def summary(self) -> str:
        if self.is_gaussian:
            return f"gaussian(sigma={self.sigma!r})"
        return "cosine"


@dataclass(frozen=True)
class GramMatrix:
    """Symmetric kernel matrix; ``normalized`` means entries were divided by n."""

    entries: np.ndarray
    normalized: bool

    @property
    def n(self) -> int:
        return self.entries.shape[0]


def as_embeddings(x, require_nonzero_rows: bool = False) -> np.ndarray:
    """Validate an embedding set and return it as a C-contiguous float64 array."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 2:
        raise InvalidParams(f"embeddings must be a 2-D array, got shape {arr.shape}")
    n, d = arr.shape
    if n < 1 or d < 1:
        raise InvalidParams(f"embeddings need n >= 1 and d >= 1, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        i, j = np.argwhere(~np.isfinite(arr))[0]
        raise NonFiniteValue(f"non-finite embedding value at row {i}, column {j}")
    if require_nonzero_rows:
        _check_row_norms(np.linalg.norm(arr, axis=1))
    return np.ascontiguousarray(arr)


def _check_row_norms(norms: np.ndarray) -> None:
    bad = np.flatnonzero(norms < MIN_ROW_NORM)
    if bad.size:
        raise ZeroNormVector(f"row {bad[0]} has norm {norms[bad[0]]:.3g}; cosine kernel needs nonzero rows")


def unit_rows(E) -> np.ndarray:
    """Cosine feature map: every row scaled to unit Euclidean norm."""
    E = as_embeddings(E)
    norms = np.linalg.norm(E, axis=1)
    _check_row_norms(norms)
    return E / norms[:, None]


def evaluate_kernel(spec: KernelSpec, x, y) -> float:
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.shape != y.shape:
        raise DimensionMismatch(f"vectors have lengths {x.size} and {y.size}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise NonFiniteValue("kernel arguments must be finite")
    if spec.is_gaussian:
        diff = x - y
        return float(np.exp(-np.dot(diff, diff) / (2.0 * spec.sigma**2)))
    nx, ny = np.linalg.norm(x), np.linalg.norm(y)
    _check_row_norms(np.array([nx, ny]))
    value = float(np.dot(x / nx, y / ny))
    return min(1.0, max(-1.0, value))


def gram_matrix(spec: KernelSpec, E, normalize: bool = True) -> GramMatrix:
    """Pairwise kernel matrix of the rows of ``E``.

    The Gaussian path evaluates every squared distance directly (no
    ``|x|^2 + |y|^2 - 2x.y`` expansion), so each entry depends only on its
    two rows. Only the upper triangle is computed; the lower one is a mirror.
    """
    E = as_embeddings(E)
    n = E.shape[0]
    if spec.is_gaussian:
        if n == 1:
            K = np.ones((1, 1))
        else:
            K = squareform(pdist(E, "sqeuclidean"))
            K *= -1.0 / (2.0 * spec.sigma**2)
            np.exp(K, out=K)
    else:
        U = unit_rows(E)
        K = U @ U.T
        K = np.triu(K, 1)
        K += K.T
        np.fill_diagonal(K, 1.0)
        np.clip(K, -1.0, 1.0, out=K)
    if normalize:
        K /= n
    return GramMatrix(K, normalize)


def cross_kernel(spec: KernelSpec, A, B) -> np.ndarray:
    """Rectangular kernel block ``k(a_i, b_j)`` (unnormalized)."""
    A = as_embeddings(A)
    B = as_embeddings(B)
    if A.shape[1] != B.shape[1]:
        raise DimensionMismatch(f"embedding dimensions differ: {A.shape[1]} vs {B.shape[1]}")
    if spec.is_gaussian:
        K = cdist(A, B, "sqeuclidean")
        K *= -1.0 / (2.0 * spec.sigma**2)
        return np.exp(K, out=K)
    return np.clip(unit_rows(A) @ unit_rows(B).T, -1.0, 1.0)
