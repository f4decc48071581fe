"""Order-alpha Renyi entropy and the Vendi / RKE / truncated Vendi scores.

All entropies are in nats. A score is always ``exp(entropy)``.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy.special import logsumexp

from .errors import InvalidAlpha, NotAProbability
from .kernels import KernelSpec, as_embeddings, gram_matrix
from .spectra import Spectrum, spectrum_from_covariance, spectrum_from_gram, truncate_spectrum

# |alpha - 1| below this uses the Shannon formula
SHANNON_TOL = 1e-9
# tolerated deviation of a spectrum's sum from 1
SUM_TOL = 1e-6
# tiny negatives (e.g. from a shifted truncation) treated as zero
NEG_TOL = 1e-12


class Method(str, Enum):
    EXACT = "exact"
    TRUNCATED = "truncated"
    NYSTROM = "nystrom"
    FKEA = "fkea"
    RKE = "rke"
    ORACLE = "oracle"


@dataclass(frozen=True)
class ScoreReport:
    method: Method
    alpha: float
    score: float
    entropy: float
    n: int
    kernel: KernelSpec
    t: Optional[int] = None
    seed: Optional[int] = None
    elapsed_seconds: float = 0.0


def check_alpha(alpha) -> float:
    try:
        a = float(alpha)
    except (TypeError, ValueError):
        raise InvalidAlpha(f"alpha must be a number, got {alpha!r}") from None
    if not np.isfinite(a) or a <= 0:
        raise InvalidAlpha(f"alpha must be a positive finite number, got {alpha!r}")
    return a


def renyi_entropy(values, alpha: float) -> float:
    """Renyi entropy of order ``alpha`` of a probability vector (natural log).

    Zero entries contribute nothing for every order (``0 log 0 = 0``,
    ``0**alpha = 0``).
    """
    alpha = check_alpha(alpha)
    p = np.asarray(values, dtype=np.float64).ravel()
    if p.size == 0 or not np.all(np.isfinite(p)):
        raise NotAProbability("probability vector must be nonempty and finite")
    if p.min() < -NEG_TOL:
        raise NotAProbability(f"negative probability {p.min():.3e}")
    total = p.sum()
    if abs(total - 1.0) > SUM_TOL:
        raise NotAProbability(f"probabilities sum to {total!r}, not 1")
    p = p[p > 0]
    if abs(alpha - 1.0) < SHANNON_TOL:
        return float(-np.dot(p, np.log(p)))
    return float(logsumexp(alpha * np.log(p)) / (1.0 - alpha))


def transformed_score(score: float, alpha: float) -> float:
    """Map a score to the space where the concentration bounds are stated.

    For ``alpha != 1`` this is ``score ** ((1 - alpha) / alpha)``, i.e. the
    alpha-norm of the spectrum; for ``alpha == 1`` it is ``log(score)``.
    """
    alpha = check_alpha(alpha)
    if abs(alpha - 1.0) < SHANNON_TOL:
        return float(np.log(score))
    return float(score ** ((1.0 - alpha) / alpha))


def empirical_spectrum(E, spec: KernelSpec) -> Spectrum:
    """Spectrum of K/n, taking the d x d covariance shortcut for cosine when d < n."""
    E = as_embeddings(E)
    n, d = E.shape
    if not spec.is_gaussian and d < n:
        return spectrum_from_covariance(E, spec)
    return spectrum_from_gram(gram_matrix(spec, E, normalize=True))


def vendi_score(E, spec: KernelSpec, alpha: float = 1.0) -> ScoreReport:
    alpha = check_alpha(alpha)
    start = time.perf_counter()
    E = as_embeddings(E)
    h = renyi_entropy(empirical_spectrum(E, spec).values, alpha)
    return ScoreReport(
        Method.EXACT, alpha, float(np.exp(h)), h, E.shape[0], spec,
        elapsed_seconds=time.perf_counter() - start,
    )


def rke_score(E, spec: KernelSpec) -> ScoreReport:
    """RKE mode count ``1 / ||K/n||_F^2`` straight from the Gram entries."""
    start = time.perf_counter()
    E = as_embeddings(E)
    G = gram_matrix(spec, E, normalize=True).entries
    frob2 = float(np.sum(G * G))
    score = 1.0 / frob2
    return ScoreReport(
        Method.RKE, 2.0, score, float(np.log(score)), E.shape[0], spec,
        elapsed_seconds=time.perf_counter() - start,
    )


def truncated_score(spectrum, alpha: float, t: int) -> tuple[float, float]:
    """(entropy, score) of the ``t``-truncated version of ``spectrum``."""
    h = renyi_entropy(truncate_spectrum(spectrum, t).values, alpha)
    return h, float(np.exp(h))


def truncated_vendi_score(E, spec: KernelSpec, alpha: float, t: int) -> ScoreReport:
    alpha = check_alpha(alpha)
    start = time.perf_counter()
    E = as_embeddings(E)
    h, score = truncated_score(empirical_spectrum(E, spec), alpha, t)
    return ScoreReport(
        Method.TRUNCATED, alpha, score, h, E.shape[0], spec, t=int(t),
        elapsed_seconds=time.perf_counter() - start,
    )
