"""Exact population scores for finitely supported distributions, the
closed-form concentration bounds, and a Monte Carlo check of those bounds.
"""
from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .approx import DEFAULT_RCOND, fkea_spectrum, nystrom_spectrum
from .entropy import (
    SHANNON_TOL,
    Method,
    ScoreReport,
    check_alpha,
    empirical_spectrum,
    renyi_entropy,
    rke_score,
    transformed_score,
    truncated_score,
)
from .errors import InfiniteDimensionalKernel, InvalidParams, IoFailure, PreconditionViolated
from .kernels import KernelSpec, as_embeddings, gram_matrix
from .spectra import ORACLE, Spectrum, symmetric_spectrum

PROB_TOL = 1e-12

THM1 = "thm1"
COR1 = "cor1"
COR2A = "cor2a"
COR2B = "cor2b"
THM2 = "thm2"
THM3A = "thm3a"
THM3B = "thm3b"
STATEMENTS = (THM1, COR1, COR2A, COR2B, THM2, THM3A, THM3B)
# statements whose bound carries an unspecified universal constant
ASYMPTOTIC = frozenset({THM3B})


@dataclass(frozen=True)
class DiscreteDistribution:
    """Atoms (rows of ``support``) with probabilities ``probs``."""

    support: np.ndarray
    probs: np.ndarray
    label: str = ""

    def __post_init__(self):
        support = as_embeddings(self.support)
        probs = np.asarray(self.probs, dtype=np.float64).ravel()
        if probs.size != support.shape[0]:
            raise InvalidParams(f"{support.shape[0]} atoms but {probs.size} probabilities")
        if not np.all(np.isfinite(probs)) or probs.min() < 0:
            raise InvalidParams("probabilities must be finite and nonnegative")
        if abs(probs.sum() - 1.0) > PROB_TOL:
            raise InvalidParams(f"probabilities sum to {probs.sum()!r}, not 1")
        support.setflags(write=False)
        probs.setflags(write=False)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "probs", probs)

    @property
    def m(self) -> int:
        return self.support.shape[0]

    @property
    def d(self) -> int:
        return self.support.shape[1]

    @classmethod
    def uniform(cls, support, label: str = "") -> "DiscreteDistribution":
        support = np.asarray(support, dtype=np.float64)
        return cls(support, np.full(support.shape[0], 1.0 / support.shape[0]), label)

    def to_dict(self) -> dict:
        return {"support": self.support.tolist(), "probs": self.probs.tolist(), "label": self.label}

    @classmethod
    def from_dict(cls, doc: dict) -> "DiscreteDistribution":
        try:
            return cls(np.asarray(doc["support"], dtype=np.float64), doc["probs"], str(doc.get("label", "")))
        except KeyError as exc:
            raise InvalidParams(f"distribution document lacks field {exc}") from None
        except (TypeError, ValueError) as exc:
            if isinstance(exc, InvalidParams):
                raise
            raise InvalidParams(f"malformed distribution document: {exc}") from None


def load_distribution(path) -> DiscreteDistribution:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidParams(f"{path} is not valid JSON: {exc}") from None
    return DiscreteDistribution.from_dict(doc)


def save_distribution(dist: DiscreteDistribution, path) -> None:
    try:
        with open(path, "w") as fh:
            json.dump(dist.to_dict(), fh)
            fh.write("\n")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def population_spectrum(dist: DiscreteDistribution, spec: KernelSpec) -> Spectrum:
    """Spectrum of the population kernel covariance.

    Its nonzero eigenvalues are those of the m x m matrix
    ``sqrt(p_i p_j) k(a_i, a_j)``.
    """
    K = gram_matrix(spec, dist.support, normalize=False).entries
    r = np.sqrt(dist.probs)
    return symmetric_spectrum(K * np.outer(r, r), ORACLE)


def population_vendi(dist: DiscreteDistribution, spec: KernelSpec, alpha: float = 1.0,
                     t: Optional[int] = None) -> ScoreReport:
    alpha = check_alpha(alpha)
    start = time.perf_counter()
    s = population_spectrum(dist, spec)
    if t is None:
        h = renyi_entropy(s.values, alpha)
        score = float(np.exp(h))
    else:
        h, score = truncated_score(s, alpha, t)
        t = int(t)
    return ScoreReport(Method.ORACLE, alpha, score, h, dist.m, spec, t=t,
                       elapsed_seconds=time.perf_counter() - start)


def sample_indices(dist: DiscreteDistribution, n: int, seed) -> np.ndarray:
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise InvalidParams(f"sample size must be a positive integer, got {n!r}")
    u = np.random.default_rng(seed).random(int(n))
    cdf = np.cumsum(dist.probs)
    idx = np.searchsorted(cdf, u * cdf[-1], side="right")
    return np.minimum(idx, dist.m - 1)


def sample_from(dist: DiscreteDistribution, n: int, seed) -> np.ndarray:
    """``n`` i.i.d. atoms by inverse CDF. ``seed`` is anything
    :func:`numpy.random.default_rng` accepts."""
    return dist.support[sample_indices(dist, n, seed)].copy()


# ---------------------------------------------------------------- bounds


@dataclass(frozen=True)
class BoundQuery:
    statement: str
    n: int
    delta: float
    alpha: float = 1.0
    d: Optional[int] = None
    t: Optional[int] = None
    tau: Optional[float] = None
    r: Optional[int] = None


def _shannon_gap(eps: float, dim: float) -> float:
    # entropy change of a dim-dimensional probability vector moved by eps in l2, eps <= 1/e
    return eps * math.sqrt(dim) * math.log(math.sqrt(dim) / eps)


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise PreconditionViolated(message)


def theoretical_bound(q: BoundQuery) -> float:
    """Right-hand side of the requested concentration statement (natural logs).

    ``thm1`` bounds the l2 distance between sorted spectra. ``cor1``,
    ``cor2b``, ``thm2``, ``thm3a`` and ``thm3b`` bound the gap between
    ``score ** ((1 - alpha) / alpha)`` values; at ``alpha == 1`` the gap is
    taken between log-scores (``cor2a``, and the truncated statements with
    the dimension replaced by ``t``). ``thm3b`` is only known up to a
    universal constant, reported here as 1.
    """
    st = str(q.statement).lower()
    if st not in STATEMENTS:
        raise InvalidParams(f"unknown statement {q.statement!r}; expected one of {', '.join(STATEMENTS)}")
    n = q.n
    _require(not isinstance(n, bool) and int(n) == n and n >= 1, f"n must be a positive integer, got {n!r}")
    _require(0 < q.delta < 1, f"delta must lie in (0, 1), got {q.delta!r}")
    n, delta = int(n), float(q.delta)
    alpha = check_alpha(q.alpha)
    shannon = abs(alpha - 1.0) < SHANNON_TOL
    log2d = math.log(2.0 / delta)

    def need(name):
        value = getattr(q, name)
        _require(value is not None, f"statement {st} requires {name}")
        _require(value > 0, f"{name} must be positive, got {value!r}")
        return value

    def bernstein_regime():
        lhs = 2 + 8 * math.log(1.0 / delta)
        _require(n >= lhs, f"n >= 2 + 8 ln(1/delta) = {lhs:.4f} fails for n = {n}")

    def eps_regime(eps, what):
        _require(eps <= 1 / math.e, f"{what}: l2 radius {eps:.4g} exceeds 1/e, log-entropy bound undefined")

    if st in (THM1, COR1):
        bernstein_regime()
        if st == COR1:
            _require(alpha >= 2, f"cor1 needs alpha >= 2, got {alpha}")
        return math.sqrt(32 * log2d / n)

    if st == COR2A:
        d = need("d")
        lhs = 32 * math.e**2 * log2d
        _require(n >= lhs, f"n >= 32 e^2 ln(2/delta) = {lhs:.4f} fails for n = {n}")
        return math.sqrt(8 * d * log2d / n) * math.log(n * d / (32 * log2d))

    if st == COR2B:
        d = need("d")
        bernstein_regime()
        _require(1 < alpha < 2, f"cor2b needs 1 < alpha < 2, got {alpha}")
        return math.sqrt(32 * d ** (2 - alpha) * log2d / n)

    t = need("t")
    _require(shannon or alpha > 1, f"{st} is stated for alpha >= 1, got {alpha}")
    growth = max(1.0, t ** (2 - alpha))

    if st == THM2:
        bernstein_regime()
        if shannon:
            lhs = 32 * math.e**2 * log2d
            _require(n >= lhs, f"alpha = 1 needs n >= 32 e^2 ln(2/delta) = {lhs:.4f}, got n = {n}")
            return _shannon_gap(math.sqrt(32 * log2d / n), t)
        return math.sqrt(32 * growth * log2d / n)

    if st == THM3A:
        bernstein_regime()
        m = min(n, t)
        log3d = math.log(3.0 / delta)
        if shannon:
            eps = math.sqrt(128 * log3d / m)
            eps_regime(eps, "thm3a at alpha = 1")
            return _shannon_gap(eps, t)
        return math.sqrt(128 * growth * log3d / m)

    # THM3B, constant fixed at 1
    tau = need("tau")
    r = need("r")
    lhs = r * tau * math.log(n)
    _require(t >= lhs, f"t >= r tau ln(n) = {lhs:.4f} fails for t = {t}")
    _require(n >= 2, "thm3b needs n >= 2")
    radius2 = log2d * t * tau**2 * math.log(n) ** 2 / n
    if shannon:
        eps = math.sqrt(radius2)
        eps_regime(eps, "thm3b at alpha = 1")
        return _shannon_gap(eps, t)
    return math.sqrt(growth * radius2)


# ------------------------------------------------------------ Monte Carlo


@dataclass
class MonteCarloResult:
    statement: str
    violations: int
    trials: int
    bound: float
    distances: list = field(default_factory=list)
    asymptotic: bool = False

    @property
    def violation_rate(self) -> float:
        return self.violations / self.trials if self.trials else 0.0


def _truncated_gap(sample_spectrum, pop_spectrum, alpha, t):
    _, s_hat = truncated_score(sample_spectrum, alpha, t)
    _, s_pop = truncated_score(pop_spectrum, alpha, t)
    return abs(transformed_score(s_hat, alpha) - transformed_score(s_pop, alpha))


def monte_carlo_check(dist: DiscreteDistribution, spec: KernelSpec, statement: str, n: int,
                      trials: int, delta: float, alpha: float = 1.0, t: Optional[int] = None,
                      seed: int = 0, d: Optional[int] = None, tau: Optional[float] = None,
                      r: Optional[int] = None, rcond: float = DEFAULT_RCOND) -> MonteCarloResult:
    """Count how often the empirical gap of ``statement`` exceeds its bound.

    Trial ``i`` draws its samples (and any FKEA / Nystrom randomness) from
    a stream seeded by ``(seed, i)``, so results do not depend on order.
    """
    st = str(statement).lower()
    if st in (COR2A, COR2B):
        if spec.is_gaussian:
            raise InfiniteDimensionalKernel(f"{st} needs a finite-dimensional kernel (cosine)")
        d = dist.d if d is None else d
    if st == COR2A:
        alpha = 1.0
    if st == COR1:
        alpha = 2.0
    if isinstance(trials, bool) or int(trials) != trials or trials < 1:
        raise InvalidParams(f"trials must be a positive integer, got {trials!r}")
    bound = theoretical_bound(BoundQuery(st, n, delta, alpha, d=d, t=t, tau=tau, r=r))

    pop = population_spectrum(dist, spec)
    pop_transformed = transformed_score(float(np.exp(renyi_entropy(pop.values, alpha))), alpha)
    distances = []
    for i in range(int(trials)):
        ss = np.random.SeedSequence([int(seed), i])
        sample_seq, method_seq = ss.spawn(2)
        X = sample_from(dist, n, sample_seq)
        if st == THM1:
            s = empirical_spectrum(X, spec)
            length = max(len(s), len(pop))
            gap = float(np.linalg.norm(s.padded(length) - pop.padded(length)))
        elif st == COR1:
            gap = abs(rke_score(X, spec).score ** -0.5 - pop_transformed)
        elif st in (COR2A, COR2B):
            s = empirical_spectrum(X, spec)
            score = float(np.exp(renyi_entropy(s.values, alpha)))
            gap = abs(transformed_score(score, alpha) - pop_transformed)
        else:
            method_seed = int(method_seq.generate_state(1, np.uint64)[0])
            if st == THM2:
                s = empirical_spectrum(X, spec)
            elif st == THM3A:
                s = fkea_spectrum(X, spec, t, method_seed)
            else:
                s = nystrom_spectrum(X, spec, t, method_seed, rcond)
            gap = _truncated_gap(s, pop, alpha, t)
        distances.append(gap)
    violations = int(sum(g > bound for g in distances))
    return MonteCarloResult(st, violations, int(trials), bound, distances, st in ASYMPTOTIC)
