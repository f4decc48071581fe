"""Eigenspectra of trace-normalized PSD matrices and top-t truncation."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EigensolverFailure, InfiniteDimensionalKernel, InvalidParams, NotPSD
from .kernels import GramMatrix, KernelSpec, unit_rows

GRAM = "gram"
COVARIANCE = "covariance"
FKEA = "fkea"
NYSTROM = "nystrom"
ORACLE = "oracle"

# eigenvalues in [-NEG_TOL, 0) are rounding noise and are clamped to zero,
# as is anything below the numerical-rank floor size * eps * max|lambda|
NEG_TOL = 1e-8
# dropped mass |1 - S_t| below this is summation rounding; spreading it would
# put spurious positive entries in the zero padding, which orders < 1 amplify
SHIFT_ROUNDING = 1e-12
# largest feature dimension the covariance route will eigendecompose
MAX_COVARIANCE_DIM = 20_000


@dataclass(frozen=True)
class Spectrum:
    """Descending nonnegative eigenvalues.

    ``raw_sum`` is the eigenvalue sum before clamping. Spectra are never
    renormalized, so ``raw_sum`` exposes any drift from unit trace.
    """

    values: np.ndarray
    raw_sum: float
    source: str = GRAM

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64).ravel()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.size

    def padded(self, length: int) -> np.ndarray:
        """Values zero-padded (never cut) to at least ``length`` entries."""
        out = np.zeros(max(length, self.values.size))
        out[: self.values.size] = self.values
        return out


@dataclass(frozen=True)
class TruncatedSpectrum:
    t: int
    values: np.ndarray
    shift: float
    source: str = field(default=GRAM)

    def __len__(self):
        return self.t


def _sorted_eigenvalues(M: np.ndarray, source: str) -> Spectrum:
    M = np.asarray(M, dtype=np.float64)
    try:
        w = np.linalg.eigvalsh(M)
    except np.linalg.LinAlgError as exc:
        raise EigensolverFailure(f"symmetric eigensolver did not converge: {exc}") from exc
    if not np.all(np.isfinite(w)):
        raise EigensolverFailure("eigensolver returned non-finite eigenvalues")
    w = w[::-1].copy()
    raw_sum = float(w.sum())
    if w.size and w[-1] < -NEG_TOL:
        raise NotPSD(f"matrix has eigenvalue {w[-1]:.3e} < -{NEG_TOL:g}; not a valid kernel matrix")
    # numerical-rank floor: anything this small is indistinguishable from zero
    floor = w.size * np.finfo(np.float64).eps * max(abs(w[0]), abs(w[-1])) if w.size else 0.0
    w[w <= floor] = 0.0
    return Spectrum(w, raw_sum, source)


def symmetric_spectrum(M, source: str = GRAM) -> Spectrum:
    """Spectrum of an arbitrary symmetric PSD matrix (only the lower triangle is read)."""
    return _sorted_eigenvalues(M, source)


def spectrum_from_gram(G: GramMatrix) -> Spectrum:
    if not G.normalized:
        raise InvalidParams("spectrum_from_gram expects a normalized (K/n) Gram matrix")
    return _sorted_eigenvalues(G.entries, GRAM)


def spectrum_from_covariance(E, spec: KernelSpec, max_dim: int = MAX_COVARIANCE_DIM) -> Spectrum:
    """Eigenvalues of the d x d empirical covariance of cosine features.

    They coincide with the nonzero eigenvalues of K/n; the sequence has
    length d rather than n.
    """
    if spec.is_gaussian:
        raise InfiniteDimensionalKernel("the Gaussian kernel has no finite feature map; use the Gram route")
    U = unit_rows(E)
    n, d = U.shape
    if d > max_dim:
        raise InvalidParams(f"feature dimension {d} exceeds covariance cap {max_dim}")
    C = U.T @ U
    C /= n
    return _sorted_eigenvalues(C, COVARIANCE)


def truncate_spectrum(s, t: int) -> TruncatedSpectrum:
    """Keep the top ``t`` eigenvalues and spread the dropped mass uniformly.

    Each kept value becomes ``lam_i + (1 - S_t) / t`` where ``S_t`` is the sum
    of the top ``t``. Shorter inputs are zero-padded to length ``t`` first.
    For a sorted probability vector this is the Euclidean projection onto
    the simplex supported on its first ``t`` coordinates.
    """
    if isinstance(t, bool) or int(t) != t or t < 1:
        raise InvalidParams(f"truncation level t must be a positive integer, got {t!r}")
    t = int(t)
    if isinstance(s, Spectrum):
        values, source = s.values, s.source
    else:
        values, source = np.sort(np.asarray(s, dtype=np.float64).ravel())[::-1], GRAM
    top = np.zeros(t)
    k = min(t, values.size)
    top[:k] = values[:k]
    dropped = 1.0 - top.sum()
    shift = 0.0 if abs(dropped) < SHIFT_ROUNDING else dropped / t
    return TruncatedSpectrum(t, top + shift, float(shift), source)
