"""Stability of Turing stripes near onset.

Expansion coefficients from the reaction terms, analytic eigenvalue blocks on
square, hexagonal and quasi-hexagonal lattices, stability diagrams, and a
Fourier-Galerkin oracle that checks the asymptotics numerically.
"""

from __future__ import annotations

from .blocks import (LatticeBlock, OmegaParam, block_L1, block_L2_hex, block_L2_quasihex, block_L2_square,
                     omega_quasihex)
from .boundaries import (EIGEN_NAMES, FLAG_NAMES, PLANES, DiagramGrid, RegionLabel, ThresholdSet, classify_arrays,
                         classify_point, diagram_grid, hex_boundaries, hex_thresholds, quasihex_boundaries,
                         quasihex_thresholds)
from .coefficients import (CoefficientSet, compute_coefficients, response_vectors, stripe_amplitude,
                           stripe_profile)
from .config import RunConfig, build_system, dump_config, parse_config
from .errors import ConfigError, NumericalFailure, TuringStripesError
from .estimator import StripeStabilityClassifier
from .model import (SystemSpec, TuringData, designed_example, klausmeier, klausmeier_turing_rainfall,
                    linear_coeffs, verify_turing)

__version__ = "0.1.0"

__all__ = [
    "CoefficientSet", "ConfigError", "DiagramGrid", "EIGEN_NAMES", "FLAG_NAMES", "LatticeBlock",
    "NumericalFailure", "OmegaParam", "PLANES", "RegionLabel", "RunConfig", "StripeStabilityClassifier",
    "SystemSpec", "ThresholdSet", "TuringData", "TuringStripesError", "block_L1", "block_L2_hex",
    "block_L2_quasihex", "block_L2_square", "build_system", "classify_arrays", "classify_point",
    "compute_coefficients", "designed_example", "diagram_grid", "dump_config", "hex_boundaries",
    "hex_thresholds", "klausmeier", "klausmeier_turing_rainfall", "linear_coeffs", "omega_quasihex",
    "parse_config", "quasihex_boundaries", "quasihex_thresholds", "response_vectors", "stripe_amplitude",
    "stripe_profile", "verify_turing",
]
