"""Numerical oracle: Fourier-Galerkin stripes and their lattice or Bloch spectra."""

from __future__ import annotations

from .asymptotics import SCENARIOS, ConvergenceReport, calibrate_q_convention, compare_asymptotics, hypothesis_scaled
from .klausmeier import (KlausmeierScan, klausmeier_onset, klausmeier_scan, klausmeier_turing_point,
                         region_components, rhombic_criticality_crossing)
from .lattice import LatticeSpec, bloch_spectrum, lattice_linearization
from .stripe import StripeSolution, solve_stripe_1d

__all__ = [
    "SCENARIOS", "ConvergenceReport", "KlausmeierScan", "LatticeSpec", "StripeSolution", "bloch_spectrum",
    "calibrate_q_convention", "compare_asymptotics", "hypothesis_scaled", "klausmeier_onset", "klausmeier_scan",
    "klausmeier_turing_point", "lattice_linearization", "region_components", "rhombic_criticality_crossing",
    "solve_stripe_1d",
]
