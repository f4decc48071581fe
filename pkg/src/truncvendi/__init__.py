"""Vendi, RKE and t-truncated Vendi diversity scores of embedding sets.

Exact scores come from a dense eigendecomposition of the normalized kernel
matrix; FKEA (random Fourier features) and Nystrom give sub-cubic estimates
of the truncated score. A population oracle for discrete distributions and
a Monte Carlo harness check the finite-sample concentration bounds.
"""
from .approx import (
    RFFBasis,
    LandmarkSet,
    fkea_spectrum,
    fkea_truncated_vendi,
    nystrom_spectrum,
    nystrom_truncated_vendi,
    proxy_kernel,
    rff_features,
    sample_landmarks,
    sample_rff,
)
from .entropy import (
    Method,
    ScoreReport,
    empirical_spectrum,
    renyi_entropy,
    rke_score,
    transformed_score,
    truncated_vendi_score,
    vendi_score,
)
from .errors import ComputationError, ValidationError, VendiError
from .harness import SweepConfig, convergence_sweep, diversity_sweep, synth_mixture
from .io import read_embeddings, write_embeddings, write_score, write_table
from .kernels import GramMatrix, KernelSpec, evaluate_kernel, gram_matrix
from .oracle import (
    BoundQuery,
    DiscreteDistribution,
    MonteCarloResult,
    monte_carlo_check,
    population_spectrum,
    population_vendi,
    sample_from,
    theoretical_bound,
)
from .spectra import (
    Spectrum,
    TruncatedSpectrum,
    spectrum_from_covariance,
    spectrum_from_gram,
    truncate_spectrum,
)

__version__ = "0.1.0"
