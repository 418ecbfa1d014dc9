"""Reduced linearization blocks of a stripe on 1D, quasi-square, hexagonal and
quasi-hexagonal lattices.

Block entries follow the scaled form with ``alpha = eps^2 alpha'``,
``beta = eps beta'``, ``kappa_tilde = eps kappa_tilde'``, ``A = eps A'`` and a
quadratic coefficient ``q = O(eps)``.  Since every entry is homogeneous in these
scalings, the functions take unscaled values plus ``eps`` only for bookkeeping.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .coefficients import CoefficientSet, p_hex, p_quasihex
from .errors import InconsistentAmplitude, ThetaOutOfRange
from .model import SystemSpec, TuringData

__all__ = [
    "LatticeBlock",
    "OmegaParam",
    "block_L1",
    "block_L2_hex",
    "block_L2_quasihex",
    "block_L2_square",
    "omega_quasihex",
]

AMPLITUDE_TOL = 1e-8


@dataclass(frozen=True)
class LatticeBlock:
    kind: str
    entries: np.ndarray
    eigenvalues: tuple[float, float]
    order: str = "eps^2"
    inputs: dict = field(default_factory=dict)
    alt_eigenvalues: tuple[float, ...] = ()
    amplitude_consistent: bool = True


@dataclass(frozen=True)
class OmegaParam:
    """Quasi-hexagonal detuning ``omega = -theta rho_kappa kappa_tilde^2``.

    ``ell_tilde`` is the transverse detuning realizing ``omega``; ``branch=+1``
    is the root that tends to the hexagonal value ``kappa_tilde`` as ``theta -> 0``.
    """

    theta: float
    kappa_tilde: float
    rho_kappa: float
    branch: int = 1

    def __post_init__(self):
        if not (0.0 < self.theta <= 1.0):
            raise ThetaOutOfRange(f"theta must lie in (0, 1], got {self.theta}")

    @property
    def omega(self) -> float:
        return -self.theta * self.rho_kappa * self.kappa_tilde**2

    @property
    def ell_tilde(self) -> float:
        # omega' = rho (9l + 15k)(l - k)/16 = -theta rho k^2  <=>  9 l^2 + 6 k l + (16 theta - 15) k^2 = 0
        root = 4.0 * math.sqrt(max(0.0, 1.0 - self.theta))
        return self.kappa_tilde * (-1.0 + self.branch * root) / 3.0


def omega_quasihex(turing: TuringData, kappa_tilde: float, ell_tilde: float) -> float:
    return turing.rho_kappa * (9 * ell_tilde + 15 * kappa_tilde) * (ell_tilde - kappa_tilde) / 16


def _check_amplitude(coeffs, turing, A, alpha, beta, kappa_tilde, strict):
    expected = -(alpha + turing.rho_beta * beta**2 + turing.rho_kappa * kappa_tilde**2) / coeffs.rho_nl
    scale = max(abs(expected), abs(alpha), beta**2, kappa_tilde**2, 1e-300)
    ok = abs(A * A - expected) <= AMPLITUDE_TOL * max(1.0, scale)
    if not ok:
        msg = f"A^2 = {A * A!r} but the stripe equation gives {expected!r}"
        if strict:
            raise InconsistentAmplitude(msg)
        warnings.warn(msg, stacklevel=3)
    return ok


def _unscale(A_p, mu_p, eps):
    alpha_p, beta_p, kappa_p = mu_p
    return eps * A_p, eps**2 * alpha_p, eps * beta_p, eps * kappa_p


def _pair_block(kind, a, b, inputs, alt=(), ok=True) -> LatticeBlock:
    entries = np.array([[a, b], [np.conj(b), a]], dtype=complex)
    ev = (float(a - abs(b)), float(a + abs(b)))
    return LatticeBlock(kind, entries, ev, inputs=inputs, alt_eigenvalues=alt, amplitude_consistent=ok)


def block_L1(coeffs: CoefficientSet, A: float) -> LatticeBlock:
    """Stripe block in ``(e0, conj e0)`` coordinates; eigenvalues ``{0, 2 rho_nl A^2}``."""
    if A < 0:
        raise ValueError("A must be nonnegative")
    r = coeffs.rho_nl * A * A
    entries = np.array([[r, r], [r, r]], dtype=complex)
    return LatticeBlock("L1", entries, (min(0.0, 2 * r), max(0.0, 2 * r)), inputs={"A": A})


def block_L2_square(coeffs: CoefficientSet, turing: TuringData, A_p: float, mu_p, ell_p: float,
                    eps: float = 1.0, strict: bool = True) -> LatticeBlock:
    """Quasi-square block.

    ``alt_eigenvalues`` holds the two equivalent closed forms: the form with
    ``3k0 - q2 + 8q11`` and the form valid when ``q = O(eps)``.
    """
    A, alpha, beta, kap = _unscale(A_p, mu_p, eps)
    ell = eps * ell_p
    ok = _check_amplitude(coeffs, turing, A, alpha, beta, kap, strict)
    rb, rk = turing.rho_beta, turing.rho_kappa
    diag = alpha + rk * ell**2 + A * A * coeffs.xi
    closed_form = A * A * (3 * coeffs.k0 - coeffs.q2 + 8 * coeffs.q11) - rb * beta**2 + rk * (ell**2 - kap**2)
    reduced = -alpha - 2 * rb * beta**2 + rk * (ell**2 - 2 * kap**2)
    entries = np.diag([diag, diag]).astype(complex)
    return LatticeBlock("L2_square", entries, (float(diag), float(diag)),
                        inputs={"A_p": A_p, "mu_p": tuple(mu_p), "ell_p": ell_p, "eps": eps},
                        alt_eigenvalues=(float(closed_form), float(reduced)), amplitude_consistent=ok)


def block_L2_hex(sys: SystemSpec, coeffs: CoefficientSet, turing: TuringData, A_p: float, mu_p,
                 eps: float = 1.0, strict: bool = True) -> LatticeBlock:
    """Hexagonal block ``[[a, b], [conj b, a]]`` with eigenvalues ``a -/+ |b|``.

    ``alt_eigenvalues`` holds the reduced pair built from the amplitude
    ``sqrt(-(alpha + rho_beta beta^2 + rho_kappa kappa_tilde^2)/(3 k0))``.
    """
    A, alpha, beta, kap = _unscale(A_p, mu_p, eps)
    ok = _check_amplitude(coeffs, turing, A, alpha, beta, kap, strict)
    rb, rk = turing.rho_beta, turing.rho_kappa
    a = alpha + 0.25 * rb * beta**2 + rk * kap**2 + A * A * coeffs.eta
    b = 2 * A * coeffs.q + A * p_hex(sys, coeffs, turing, beta, kap)
    At2 = max(0.0, -(alpha + rb * beta**2 + rk * kap**2) / (3 * coeffs.k0))
    At = math.sqrt(At2)
    base = 3 * coeffs.k0 * At2 - 0.75 * rb * beta**2
    alt = (base - 2 * At * abs(coeffs.q), base + 2 * At * abs(coeffs.q))
    return _pair_block("L2_hex", a, b, {"A_p": A_p, "mu_p": tuple(mu_p), "eps": eps}, alt, ok)


def block_L2_quasihex(sys: SystemSpec, coeffs: CoefficientSet, turing: TuringData, A_p: float, mu_p,
                      ell_p: float, eps: float = 1.0, strict: bool = True) -> LatticeBlock:
    """Quasi-hexagonal block; equals :func:`block_L2_hex` at ``ell_p = kappa_p``.

    ``alt_eigenvalues`` holds the closed form with ``3k0 - q2 + 8q1`` and the
    detuning ``omega``.
    """
    A, alpha, beta, kap = _unscale(A_p, mu_p, eps)
    ell = eps * ell_p
    ok = _check_amplitude(coeffs, turing, A, alpha, beta, kap, strict)
    rb, rk = turing.rho_beta, turing.rho_kappa
    a = alpha + 0.25 * rb * beta**2 + rk * (kap + 3 * ell) ** 2 / 16 + A * A * coeffs.eta
    b = 2 * A * coeffs.q + A * p_quasihex(sys, coeffs, turing, beta, kap, ell)
    base = (A * A * (3 * coeffs.k0 - coeffs.q2 + 8 * coeffs.q1) - 0.75 * rb * beta**2
            + omega_quasihex(turing, kap, ell))
    alt = (base - abs(b), base + abs(b))
    return _pair_block("L2_quasihex", a, b,
                       {"A_p": A_p, "mu_p": tuple(mu_p), "ell_p": ell_p, "eps": eps}, alt, ok)
