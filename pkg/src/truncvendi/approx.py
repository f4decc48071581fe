"""Sub-cubic spectrum estimators: random Fourier features (FKEA) and Nystrom.

Both return at most ``2t`` (FKEA) or ``t`` (Nystrom) eigenvalues and feed the
same truncation + entropy pipeline as the exact scores.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .entropy import Method, ScoreReport, check_alpha, truncated_score
from .errors import DegenerateLandmarks, InvalidParams, ShiftInvariantRequired
from .kernels import KernelSpec, as_embeddings, cross_kernel
from .spectra import FKEA, NYSTROM, Spectrum, symmetric_spectrum

DEFAULT_RCOND = 1e-10
# rows per block when accumulating the 2t x 2t feature covariance
_ROW_BLOCK = 4096


def _positive_int(name, value) -> int:
    if isinstance(value, bool) or int(value) != value or value < 1:
        raise InvalidParams(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def _seed(seed) -> int:
    if isinstance(seed, bool) or int(seed) != seed or not 0 <= seed < 2**64:
        raise InvalidParams(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    return int(seed)


@dataclass(frozen=True)
class RFFBasis:
    frequencies: np.ndarray  # (t, d), rows ~ N(0, sigma^-2 I)
    sigma: float
    seed: int

    @property
    def t(self) -> int:
        return self.frequencies.shape[0]

    @property
    def d(self) -> int:
        return self.frequencies.shape[1]


def sample_rff(d: int, t: int, sigma: float, seed: int) -> RFFBasis:
    """Draw ``t`` Gaussian-kernel frequencies in dimension ``d``.

    A single PCG64 stream is consumed in row-major order, so the basis is a
    pure function of ``(d, t, sigma, seed)``.
    """
    d = _positive_int("d", d)
    t = _positive_int("t", t)
    sigma = float(sigma)
    if not np.isfinite(sigma) or sigma <= 0:
        raise InvalidParams(f"sigma must be positive, got {sigma!r}")
    seed = _seed(seed)
    rng = np.random.default_rng(seed)
    freqs = rng.standard_normal((t, d)) / sigma
    freqs.setflags(write=False)
    return RFFBasis(freqs, sigma, seed)


def rff_features(E, basis: RFFBasis) -> np.ndarray:
    """``(n, 2t)`` features ``[cos(Xw), sin(Xw)] / sqrt(t)``; every row has unit norm."""
    E = as_embeddings(E)
    if E.shape[1] != basis.d:
        raise InvalidParams(f"basis has dimension {basis.d}, embeddings have {E.shape[1]}")
    proj = E @ basis.frequencies.T
    scale = 1.0 / np.sqrt(basis.t)
    return np.hstack([np.cos(proj), np.sin(proj)]) * scale


def proxy_kernel(x, y, basis: RFFBasis) -> np.ndarray:
    """FKEA proxy ``(1/t) sum_i cos(w_i . (x - y))`` for paired rows of x and y."""
    diff = np.atleast_2d(np.asarray(x, dtype=np.float64)) - np.atleast_2d(np.asarray(y, dtype=np.float64))
    return np.cos(diff @ basis.frequencies.T).mean(axis=1)


def _gaussian_sigma(kernel) -> float:
    if isinstance(kernel, KernelSpec):
        if not kernel.is_gaussian:
            raise ShiftInvariantRequired("FKEA needs a shift-invariant kernel; cosine is not")
        return kernel.sigma
    return KernelSpec.gaussian(kernel).sigma


def fkea_spectrum(E, sigma, t: int, seed: int) -> Spectrum:
    """Eigenvalues of the ``2t x 2t`` covariance of random Fourier features.

    ``sigma`` may be a bandwidth or a :class:`KernelSpec` (which must be
    Gaussian). Cost is linear in n. When ``n < 2t`` the n x n feature Gram
    is eigendecomposed instead; its nonzero eigenvalues are the same.
    """
    sigma = _gaussian_sigma(sigma)
    E = as_embeddings(E)
    n, d = E.shape
    basis = sample_rff(d, t, sigma, seed)
    m = 2 * basis.t
    if n < m:
        phi = rff_features(E, basis)
        return symmetric_spectrum(phi @ phi.T / n, FKEA)
    C = np.zeros((m, m))
    for start in range(0, n, _ROW_BLOCK):
        phi = rff_features(E[start:start + _ROW_BLOCK], basis)
        C += phi.T @ phi
    C /= n
    return symmetric_spectrum(C, FKEA)


@dataclass(frozen=True)
class LandmarkSet:
    indices: np.ndarray
    seed: int
    rcond: float = DEFAULT_RCOND

    @property
    def t(self) -> int:
        return self.indices.size


def sample_landmarks(n: int, t: int, seed: int, rcond: float = DEFAULT_RCOND) -> LandmarkSet:
    n = _positive_int("n", n)
    t = _positive_int("t", t)
    if t > n:
        raise InvalidParams(f"Nystrom needs t <= n, got t={t}, n={n}")
    rcond = float(rcond)
    if not 0 <= rcond < 1:
        raise InvalidParams(f"rcond must lie in [0, 1), got {rcond!r}")
    seed = _seed(seed)
    idx = np.sort(np.random.default_rng(seed).choice(n, size=t, replace=False))
    idx.setflags(write=False)
    return LandmarkSet(idx, seed, rcond)


def nystrom_spectrum(E, spec: KernelSpec, t: int, seed: int, rcond: float = DEFAULT_RCOND) -> Spectrum:
    """Spectrum of the Nystrom approximation ``C W^+ C^T / n``.

    ``W = K[S, S]`` and ``C = K[:, S]`` for ``t`` uniformly sampled
    landmarks ``S``. Eigenvalues of ``W`` at or below ``rcond * max(W)``
    are dropped from the pseudo-inverse. The nonzero spectrum equals that of
    ``B^T B / n`` with ``B = C V diag(w^-1/2)``, a ``k x k`` problem with
    ``k <= t``.
    """
    E = as_embeddings(E)
    n = E.shape[0]
    marks = sample_landmarks(n, t, seed, rcond)
    C = cross_kernel(spec, E, E[marks.indices])
    W = C[marks.indices]
    W = 0.5 * (W + W.T)
    w, V = np.linalg.eigh(W)
    if w[-1] <= 0:
        raise DegenerateLandmarks("landmark kernel block has no positive eigenvalue")
    keep = w > marks.rcond * w[-1]
    B = C @ (V[:, keep] / np.sqrt(w[keep]))
    M = B.T @ B
    M /= n
    return symmetric_spectrum(M, NYSTROM)


def _approx_report(method, spectrum, alpha, t, n, spec, seed, start) -> ScoreReport:
    h, score = truncated_score(spectrum, alpha, t)
    return ScoreReport(method, alpha, score, h, n, spec, t=int(t), seed=int(seed),
                       elapsed_seconds=time.perf_counter() - start)


def fkea_truncated_vendi(E, sigma, alpha: float, t: int, seed: int) -> ScoreReport:
    """t-truncated Vendi from the top ``t`` of the ``2t`` FKEA eigenvalues."""
    alpha = check_alpha(alpha)
    start = time.perf_counter()
    spec = sigma if isinstance(sigma, KernelSpec) else KernelSpec.gaussian(sigma)
    E = as_embeddings(E)
    s = fkea_spectrum(E, spec, t, seed)
    return _approx_report(Method.FKEA, s, alpha, t, E.shape[0], spec, seed, start)


def nystrom_truncated_vendi(E, spec: KernelSpec, alpha: float, t: int, seed: int,
                            rcond: float = DEFAULT_RCOND) -> ScoreReport:
    alpha = check_alpha(alpha)
    start = time.perf_counter()
    E = as_embeddings(E)
    s = nystrom_spectrum(E, spec, t, seed, rcond)
    return _approx_report(Method.NYSTROM, s, alpha, t, E.shape[0], spec, seed, start)
