"""Sparse-grid quasi-interpolation of periodic functions in weighted Wiener spaces."""

from sparsewiener.kernels import QuasiInterpScheme, builtin_scheme
from sparsewiener.norms import NormParams, block_norm, lp_char_norm, wiener_norm
from sparsewiener.quasi_interp import apply_eta, apply_P, apply_Q, apply_Q_direct
from sparsewiener.rates import RateSpec, run_experiment, theoretical_rate
from sparsewiener.sparse_grid import SparseIndexSet, build_delta, build_energy
from sparsewiener.spectral import KorobovRule, SpectralFunction, TrigPolynomial

__version__ = "0.1.0"

__all__ = [
    "KorobovRule",
    "NormParams",
    "QuasiInterpScheme",
    "RateSpec",
    "SparseIndexSet",
    "SpectralFunction",
    "TrigPolynomial",
    "apply_P",
    "apply_Q",
    "apply_Q_direct",
    "apply_eta",
    "block_norm",
    "build_delta",
    "build_energy",
    "builtin_scheme",
    "lp_char_norm",
    "run_experiment",
    "theoretical_rate",
    "wiener_norm",
]
