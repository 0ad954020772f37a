"""Rényi divergences, smoothing and strong converse exponents for finite-dimensional quantum states."""

from .linalg import ValidationError, fidelity, partial_trace, pinch, purified_distance
from .states import CQState, DensityMatrix, random_cq, random_density
from .divergences import DivergenceSpec, divergence, log_euclidean, petz, sandwiched
from .entropies import conditional_entropy, min_over_sigma, mutual_information
from .exponents import exponent_dec, exponent_dmax, exponent_pa
from .smoothing import smooth_classical, smooth_max_divergence, smooth_quantum
from .method_of_types import convergence_report, finite_n_optimum
from .protocols import DecouplingScheme, HashFunction, dec_performance, pa_performance
from .verify import run_suite

__version__ = "0.1.0"

__all__ = [
    "CQState",
    "DecouplingScheme",
    "DensityMatrix",
    "DivergenceSpec",
    "HashFunction",
    "ValidationError",
    "conditional_entropy",
    "convergence_report",
    "dec_performance",
    "divergence",
    "exponent_dec",
    "exponent_dmax",
    "exponent_pa",
    "fidelity",
    "finite_n_optimum",
    "log_euclidean",
    "min_over_sigma",
    "mutual_information",
    "pa_performance",
    "partial_trace",
    "petz",
    "pinch",
    "purified_distance",
    "random_cq",
    "random_density",
    "run_suite",
    "sandwiched",
    "smooth_classical",
    "smooth_max_divergence",
    "smooth_quantum",
]
