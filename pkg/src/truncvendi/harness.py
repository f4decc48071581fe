"""Convergence and diversity sweeps on synthetic mixtures or embedding files.

Every cell draws from its own seeded stream, so sweeps are reproducible
bit-for-bit (timings aside) and rows come out in a canonical order.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .approx import DEFAULT_RCOND, fkea_spectrum, nystrom_spectrum
from .entropy import check_alpha, empirical_spectrum, renyi_entropy, rke_score, truncated_score
from .errors import GridExceedsData, InvalidParams, IoFailure
from .io import TABLE_COLUMNS, read_embeddings
from .kernels import KernelSpec, as_embeddings
from .oracle import DiscreteDistribution, load_distribution, sample_from

METHODS = ("exact", "truncated", "nystrom", "fkea", "rke")
_NEEDS_T = {"truncated", "nystrom", "fkea"}
DIVERSITY_COLUMNS = ("k",) + TABLE_COLUMNS
DEFAULT_GRID = tuple(int(round(v)) for v in np.geomspace(250, 8000, 10))


def derive_seed(*parts: int) -> int:
    """Deterministic 64-bit seed from a tuple of nonnegative integers."""
    return int(np.random.SeedSequence([int(p) for p in parts]).generate_state(1, np.uint64)[0])


def synth_mixture(k: int, d: int, spread: float, within_std: float, seed: int,
                  atoms_per_mode: int = 32, orthogonal_centers: bool = False) -> DiscreteDistribution:
    """Uniform distribution over ``k * atoms_per_mode`` atoms clustered around ``k`` centers.

    Centers lie on the sphere of radius ``spread`` (random directions, or
    mutually orthogonal ones when ``orthogonal_centers`` and ``k <= d``).
    Each atom is its center plus isotropic Gaussian noise of scale
    ``within_std``.
    """
    for name, value in (("k", k), ("d", d), ("atoms_per_mode", atoms_per_mode)):
        if isinstance(value, bool) or int(value) != value or value < 1:
            raise InvalidParams(f"{name} must be a positive integer, got {value!r}")
    if not spread >= 0 or not within_std >= 0:
        raise InvalidParams("spread and within_std must be nonnegative")
    if orthogonal_centers and k > d:
        raise InvalidParams(f"cannot place {k} orthogonal centers in dimension {d}")
    rng = np.random.default_rng(seed)
    if orthogonal_centers:
        q, _ = np.linalg.qr(rng.standard_normal((d, k)))
        directions = q.T
    else:
        g = rng.standard_normal((k, d))
        directions = g / np.linalg.norm(g, axis=1, keepdims=True)
    centers = spread * directions
    noise = within_std * rng.standard_normal((k, atoms_per_mode, d))
    atoms = (centers[:, None, :] + noise).reshape(k * atoms_per_mode, d)
    return DiscreteDistribution.uniform(atoms, label=f"mixture(k={k}, d={d}, spread={spread}, within_std={within_std})")


@dataclass
class SweepConfig:
    kernel: KernelSpec
    source: Union[DiscreteDistribution, str, Path]
    n_grid: Sequence[int] = DEFAULT_GRID
    methods: Sequence[str] = ("exact",)
    alpha: Sequence[float] = (1.0,)
    t: Optional[int] = None
    repeats: int = 1
    seed: int = 0
    source_format: Optional[str] = None
    rcond: float = DEFAULT_RCOND

    def __post_init__(self):
        self.n_grid = tuple(int(n) for n in self.n_grid)
        if not self.n_grid or any(n < 1 for n in self.n_grid):
            raise InvalidParams("n_grid must be a nonempty list of positive sample sizes")
        if any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise InvalidParams(f"n_grid must be strictly increasing, got {list(self.n_grid)}")
        methods = tuple(str(m).lower() for m in self.methods)
        unknown = [m for m in methods if m not in METHODS]
        if unknown or not methods:
            raise InvalidParams(f"unknown methods {unknown}; choose from {', '.join(METHODS)}")
        self.methods = tuple(m for m in METHODS if m in methods)
        alphas = self.alpha if isinstance(self.alpha, (list, tuple)) else [self.alpha]
        self.alpha = tuple(check_alpha(a) for a in alphas)
        if int(self.repeats) != self.repeats or self.repeats < 1:
            raise InvalidParams("repeats must be a positive integer")
        self.repeats = int(self.repeats)
        if _NEEDS_T & set(self.methods):
            if self.t is None or int(self.t) != self.t or self.t < 1:
                raise InvalidParams("a positive t is required for truncated, nystrom and fkea")
            self.t = int(self.t)

    @classmethod
    def from_dict(cls, doc: dict, base_dir=None) -> "SweepConfig":
        """Build from a JSON-style document.

        ``source`` is one of ``{"distribution": {...}}``,
        ``{"distribution_path": p}``, ``{"embeddings": p, "format": f}`` or
        ``{"synth": {k, d, spread, within_std, seed, ...}}``. Relative paths
        resolve against ``base_dir``.
        """
        doc = dict(doc)
        base = Path(base_dir) if base_dir is not None else Path(".")
        kernel = _kernel_from(doc)
        src = doc.get("source")
        if not isinstance(src, dict):
            raise InvalidParams("sweep config needs a 'source' object")
        fmt = None
        if "distribution" in src:
            source = DiscreteDistribution.from_dict(src["distribution"])
        elif "distribution_path" in src:
            source = load_distribution(base / src["distribution_path"])
        elif "synth" in src:
            source = synth_mixture(**src["synth"])
        elif "embeddings" in src:
            source, fmt = base / src["embeddings"], src.get("format")
        else:
            raise InvalidParams("source must hold 'distribution', 'distribution_path', 'synth' or 'embeddings'")
        known = {"n_grid", "methods", "alpha", "t", "repeats", "seed", "rcond"}
        extra = set(doc) - known - {"kernel", "sigma", "source"}
        if extra:
            raise InvalidParams(f"unknown sweep config fields: {sorted(extra)}")
        kwargs = {k: doc[k] for k in known if k in doc}
        return cls(kernel=kernel, source=source, source_format=fmt, **kwargs)


def _kernel_from(doc: dict) -> KernelSpec:
    k = doc.get("kernel", "cosine")
    if isinstance(k, dict):
        return KernelSpec(k.get("kind", "cosine"), k.get("sigma"))
    return KernelSpec(k, doc.get("sigma"))


def load_sweep_config(path) -> SweepConfig:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidParams(f"{path} is not valid JSON: {exc}") from None
    return SweepConfig.from_dict(doc, base_dir=Path(path).parent)


def _method_spectrum(method, X, kernel, t, seed, rcond):
    if method in ("exact", "truncated"):
        return empirical_spectrum(X, kernel)
    if method == "nystrom":
        return nystrom_spectrum(X, kernel, t, seed, rcond)
    return fkea_spectrum(X, kernel, t, seed)


def score_cell(method: str, X, kernel: KernelSpec, alphas, t, seed, rcond=DEFAULT_RCOND,
               cache: Optional[dict] = None) -> list[dict]:
    """Scores of one sample set under one method, one dict per alpha (just alpha 2 for RKE).

    ``cache`` lets exact and truncated cells on the same sample share one
    eigendecomposition; its cost is charged to both.
    """
    if method == "rke":
        rep = rke_score(X, kernel)
        return [dict(method=method, alpha=2.0, t=None, seed=None, score=rep.score,
                     elapsed_seconds=rep.elapsed_seconds)]
    shared = method in ("exact", "truncated") and cache is not None
    if shared and "empirical" in cache:
        spectrum, spectrum_time = cache["empirical"]
    else:
        start = time.perf_counter()
        spectrum = _method_spectrum(method, X, kernel, t, seed, rcond)
        spectrum_time = time.perf_counter() - start
        if shared:
            cache["empirical"] = (spectrum, spectrum_time)
    out = []
    for a in alphas:
        start = time.perf_counter()
        if method == "exact":
            score = float(np.exp(renyi_entropy(spectrum.values, a)))
        else:
            _, score = truncated_score(spectrum, a, t)
        out.append(dict(method=method, alpha=a, t=None if method == "exact" else t,
                        seed=seed if method in ("nystrom", "fkea") else None, score=score,
                        elapsed_seconds=spectrum_time + time.perf_counter() - start))
    return out


def _sort_key(row):
    return (row.get("k", 0), METHODS.index(row["method"]), row["alpha"], row["n"], row["repeat"])


def convergence_sweep(cfg: SweepConfig) -> list[dict]:
    """Score every (n, repeat, method, alpha) cell of the config.

    Samples for a given (n, repeat) come from a stream seeded by
    ``(seed, n, repeat)`` and are shared by all methods; landmark and
    frequency draws use ``(seed, n, repeat, method index)``.
    """
    data = None
    if not isinstance(cfg.source, DiscreteDistribution):
        data = read_embeddings(cfg.source, cfg.source_format)
        if data.shape[0] < max(cfg.n_grid):
            raise GridExceedsData(f"source has {data.shape[0]} rows but the grid asks for {max(cfg.n_grid)}")
    rows = []
    for n in cfg.n_grid:
        for rep in range(cfg.repeats):
            sample_seq = np.random.SeedSequence([int(cfg.seed), n, rep])
            if data is None:
                X = sample_from(cfg.source, n, sample_seq)
            else:
                pick = np.random.default_rng(sample_seq).choice(data.shape[0], size=n, replace=False)
                X = data[np.sort(pick)]
            cache = {}
            for method in cfg.methods:
                mseed = derive_seed(cfg.seed, n, rep, METHODS.index(method))
                for row in score_cell(method, X, cfg.kernel, cfg.alpha, cfg.t, mseed, cfg.rcond, cache):
                    row.update(sigma=cfg.kernel.sigma, n=n, repeat=rep)
                    rows.append(row)
    rows.sort(key=_sort_key)
    return rows


def diversity_sweep(k_grid: Sequence[int], d: int, kernel: KernelSpec, alpha, t: int, seed: int,
                    n: int = 2000, spread: float = 1.0, within_std: float = 0.0, repeats: int = 1,
                    methods: Sequence[str] = ("exact", "truncated", "nystrom", "fkea"),
                    atoms_per_mode: int = 32, orthogonal_centers: bool = True,
                    rcond: float = DEFAULT_RCOND) -> list[dict]:
    """Scores of synthetic mixtures with a growing number of modes ``k``.

    Rows carry a ``k`` column in front of the usual table columns.
    """
    rows = []
    for k in k_grid:
        dist = synth_mixture(k, d, spread, within_std, derive_seed(seed, k),
                             atoms_per_mode=atoms_per_mode, orthogonal_centers=orthogonal_centers)
        cfg = SweepConfig(kernel=kernel, source=dist, n_grid=(n,), methods=methods, alpha=alpha,
                          t=t, repeats=repeats, seed=derive_seed(seed, k, 1), rcond=rcond)
        for row in convergence_sweep(cfg):
            row["k"] = int(k)
            rows.append(row)
    rows.sort(key=_sort_key)
    return rows


@dataclass
class DiversityConfig:
    """File form of :func:`diversity_sweep` arguments."""

    k_grid: Sequence[int]
    d: int
    kernel: KernelSpec
    t: int
    alpha: Sequence[float] = (1.0,)
    seed: int = 0
    n: int = 2000
    spread: float = 1.0
    within_std: float = 0.0
    repeats: int = 1
    methods: Sequence[str] = ("exact", "truncated", "nystrom", "fkea")
    atoms_per_mode: int = 32
    orthogonal_centers: bool = True
    rcond: float = DEFAULT_RCOND

    @classmethod
    def from_dict(cls, doc: dict) -> "DiversityConfig":
        doc = dict(doc)
        kernel = _kernel_from(doc)
        doc.pop("kernel", None)
        doc.pop("sigma", None)
        names = set(cls.__dataclass_fields__) - {"kernel"}
        extra = set(doc) - names
        if extra:
            raise InvalidParams(f"unknown diversity config fields: {sorted(extra)}")
        for req in ("k_grid", "d", "t"):
            if req not in doc:
                raise InvalidParams(f"diversity config requires '{req}'")
        return cls(kernel=kernel, **doc)

    def run(self) -> list[dict]:
        return diversity_sweep(self.k_grid, self.d, self.kernel, self.alpha, self.t, self.seed,
                               n=self.n, spread=self.spread, within_std=self.within_std,
                               repeats=self.repeats, methods=self.methods,
                               atoms_per_mode=self.atoms_per_mode,
                               orthogonal_centers=self.orthogonal_centers, rcond=self.rcond)


def load_diversity_config(path) -> DiversityConfig:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidParams(f"{path} is not valid JSON: {exc}") from None
    return DiversityConfig.from_dict(doc)


def relative_change(rows: list[dict], method: str, alpha: float, n_from: int, n_to: int) -> float:
    """``score(n_to) / score(n_from) - 1`` for one method, using the median over repeats."""
    def med(n):
        vals = [r["score"] for r in rows if r["method"] == method and r["alpha"] == alpha and r["n"] == n]
        if not vals:
            raise InvalidParams(f"no {method} rows at n={n}, alpha={alpha}")
        return float(np.median(vals))
    return med(n_to) / med(n_from) - 1.0


def as_source(E) -> DiscreteDistribution:
    """Empirical distribution of the rows of ``E``."""
    return DiscreteDistribution.uniform(as_embeddings(E), label="empirical")
