"""Nonlinear expansion coefficients of the stripe branch.

All inverses of the singular operator ``-kc^2 D + L`` are taken on its range
with the gauge ``<w, E0*> = 0`` (bordered solve).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import RhsNotInRange, SingularAuxiliaryOperator, SupercriticalityViolated
from .model import SystemSpec, TuringData, _valid, advection_matrix, bilinear, linear_coeffs, trilinear

__all__ = [
    "CoefficientSet",
    "StripeAsymptotic",
    "compute_coefficients",
    "cubic_coeffs",
    "p_hex",
    "p_quasihex",
    "quadratic_coeffs",
    "reduced_inverse",
    "response_vectors",
    "stripe_amplitude",
    "stripe_profile",
    "stripe_velocity",
]

RANGE_TOL = 1e-10


def reduced_inverse(singular_op, rhs, E0, E0_star, tol: float = RANGE_TOL) -> np.ndarray:
    """Solve ``singular_op w = rhs`` with ``<w, E0*> = 0`` via Keller bordering.

    ``rhs`` must lie in the range, i.e. ``<rhs, E0*> = 0``.
    """
    rhs = np.asarray(rhs)
    scale = max(1.0, float(np.abs(rhs).max(initial=0.0)))
    resid = rhs @ E0_star
    if abs(resid) > tol * scale:
        raise RhsNotInRange(f"<rhs, E0*> = {resid} is not zero")
    A = np.zeros((3, 3))
    A[:2, :2] = singular_op
    A[:2, 2] = E0
    A[2, :2] = E0_star
    b = np.zeros(3, dtype=np.result_type(rhs, float))
    b[:2] = rhs
    sol = np.linalg.solve(A, b)
    return sol[:2]


def _solve_aux(A: np.ndarray, rhs: np.ndarray, which: str) -> np.ndarray:
    if abs(np.linalg.det(A)) < 1e-12 * max(1.0, np.abs(A).max()) ** 2:
        raise SingularAuxiliaryOperator(which)
    return np.linalg.solve(A, rhs)


@dataclass(frozen=True)
class CoefficientSet:
    """Coefficients of the stripe expansion.

    ``q_raw`` is the direct contraction ``<Q[E0,E0], E0*>``; ``q`` is the value
    used by the stability formulas, ``q = q_scale * q_raw``.
    """

    q0: float
    q2: float
    k0: float
    rho_nl: float
    Q0: np.ndarray
    Q2: np.ndarray
    w_Aalpha: np.ndarray
    w_Abeta: np.ndarray
    w_Akappa: np.ndarray
    w_Abetabeta: np.ndarray
    q_raw: float
    q1: float
    q11: float
    Q1: np.ndarray
    Q11: np.ndarray
    xi: float
    eta: float
    c: float
    q_scale: float = 1.0

    @property
    def q(self) -> float:
        return self.q_scale * self.q_raw

    def with_q_scale(self, q_scale: float) -> "CoefficientSet":
        from dataclasses import replace
        return replace(self, q_scale=float(q_scale))


def quadratic_coeffs(sys: SystemSpec, turing: TuringData) -> dict:
    sys = _valid(sys)
    E0, E0s, kc2 = turing.E0, turing.E0_star, turing.kc**2
    D, L, Q = sys.D, sys.L, sys.Q
    QEE = bilinear(Q, E0, E0)
    # E0 is real: conj(E0) = E0
    Q0 = -2 * _solve_aux(L, QEE, "L")
    Q2 = -2 * _solve_aux(-4 * kc2 * D + L, QEE, "-4kc^2 D + L")
    Q11 = -_solve_aux(-2 * kc2 * D + L, QEE, "-2kc^2 D + L")
    q = float(QEE @ E0s)
    Q1 = reduced_inverse(-kc2 * D + L, q * E0 - QEE, E0, E0s)
    return dict(
        Q0=Q0, Q2=Q2, Q1=Q1, Q11=Q11, q=q,
        q0=float(bilinear(Q, E0, Q0) @ E0s),
        q2=float(bilinear(Q, E0, Q2) @ E0s),
        q1=float(bilinear(Q, E0, Q1) @ E0s),
        q11=float(bilinear(Q, E0, Q11) @ E0s),
    )


def cubic_coeffs(sys: SystemSpec, turing: TuringData, quad: dict) -> dict:
    sys = _valid(sys)
    E0, E0s = turing.E0, turing.E0_star
    k0 = float(trilinear(sys.K, E0, E0, E0) @ E0s)
    rho_nl = 3 * k0 + 2 * quad["q0"] + quad["q2"]
    if not rho_nl < 0:
        raise SupercriticalityViolated(rho_nl)
    return dict(k0=k0, rho_nl=rho_nl)


def response_vectors(sys: SystemSpec, turing: TuringData) -> dict:
    """First-order corrections of the critical eigenvector in the unfolding
    parameters; cross-checks ``rho_beta`` and ``rho_kappa``."""
    sys = _valid(sys)
    E0, E0s, kc = turing.E0, turing.E0_star, turing.kc
    D = sys.D
    Lc = -kc**2 * D + sys.L
    B = advection_matrix(turing.c)
    M = sys.M

    def R(rhs):
        return reduced_inverse(Lc, rhs, E0, E0s)

    w_alpha = R(((M @ E0) @ E0s) * E0 - M @ E0)
    w_beta = kc * R(((B @ E0) @ E0s) * E0 - B @ E0)
    w_kappa = 2 * kc * R(D @ E0)
    Bwb = B @ w_beta
    w_bb = 2 * kc * R(Bwb - (Bwb @ E0s) * E0)
    rho_beta_alt = -kc * float(Bwb @ E0s)
    rho_kappa_alt = -2 * kc * float((D @ w_kappa) @ E0s)
    return dict(w_Aalpha=w_alpha, w_Abeta=w_beta, w_Akappa=w_kappa, w_Abetabeta=w_bb,
                rho_beta_alt=rho_beta_alt, rho_kappa_alt=rho_kappa_alt)


def stripe_velocity(turing: TuringData) -> float:
    return -turing.lambda_beta


def compute_coefficients(sys: SystemSpec, turing: TuringData | None = None,
                         q_scale: float = 1.0) -> CoefficientSet:
    sys = _valid(sys)
    if turing is None:
        turing = linear_coeffs(sys)
    quad = quadratic_coeffs(sys, turing)
    cub = cubic_coeffs(sys, turing, quad)
    resp = response_vectors(sys, turing)
    k0, q0 = cub["k0"], quad["q0"]
    return CoefficientSet(
        q0=q0, q2=quad["q2"], k0=k0, rho_nl=cub["rho_nl"],
        Q0=quad["Q0"], Q2=quad["Q2"],
        w_Aalpha=resp["w_Aalpha"], w_Abeta=resp["w_Abeta"],
        w_Akappa=resp["w_Akappa"], w_Abetabeta=resp["w_Abetabeta"],
        q_raw=quad["q"], q1=quad["q1"], q11=quad["q11"], Q1=quad["Q1"], Q11=quad["Q11"],
        xi=6 * k0 + 2 * q0 + 8 * quad["q11"], eta=6 * k0 + 2 * q0 + 8 * quad["q1"],
        c=stripe_velocity(turing), q_scale=q_scale,
    )


# -- stripe branch -------------------------------------------------------------------

@dataclass(frozen=True)
class StripeAsymptotic:
    A: float
    alpha: float
    beta: float
    kappa_tilde: float


def stripe_amplitude(coeffs: CoefficientSet, turing: TuringData, alpha: float,
                     beta: float = 0.0, kappa_tilde: float = 0.0) -> StripeAsymptotic | None:
    """Leading-order amplitude; ``None`` below the bifurcation surface."""
    radicand = -(alpha + turing.rho_beta * beta**2 + turing.rho_kappa * kappa_tilde**2) / coeffs.rho_nl
    if radicand < 0:
        return None
    return StripeAsymptotic(math.sqrt(radicand), alpha, beta, kappa_tilde)


def stripe_profile(coeffs: CoefficientSet, turing: TuringData, A: float,
                   mu: tuple[float, float, float], x) -> np.ndarray:
    """Leading-order stripe on the rescaled domain ``x in [0, 2 pi)``.

    Returns an array of shape ``(2, len(x))``.  ``mu = (alpha, beta, kappa_tilde)``;
    ``alpha`` enters through ``a_check = alpha / lambda_M``.
    """
    alpha, beta, kap = mu
    x = np.asarray(x, dtype=float)
    alpha_check = alpha / turing.lambda_M
    e_vec = (turing.E0 + alpha_check * coeffs.w_Aalpha + 1j * beta * coeffs.w_Abeta
             + kap * coeffs.w_Akappa + beta**2 * coeffs.w_Abetabeta)
    first = 2 * A * np.real(np.outer(e_vec, np.exp(1j * x)))
    second = A**2 * (np.outer(coeffs.Q2, np.cos(2 * x)) + coeffs.Q0[:, None])
    return first + second


# -- triad coupling terms -----------------------------------------------------------

def p_hex(sys: SystemSpec, coeffs: CoefficientSet, turing: TuringData,
          beta_p: float, kappa_p: float) -> complex:
    sys = _valid(sys)
    kc = turing.kc
    B = advection_matrix(turing.c)
    v = 1j * beta_p * coeffs.w_Abeta + 4 * kappa_p * coeffs.w_Akappa
    t1 = bilinear(sys.Q, v, turing.E0) @ turing.E0_star
    t2 = ((-4 * kappa_p * kc * sys.D - 1j * beta_p * kc * B) @ coeffs.Q1) @ turing.E0_star
    return complex(t1 + t2)


def p_quasihex(sys: SystemSpec, coeffs: CoefficientSet, turing: TuringData,
               beta_p: float, kappa_p: float, ell_p: float) -> complex:
    sys = _valid(sys)
    kc = turing.kc
    B = advection_matrix(turing.c)
    v = 1j * beta_p * coeffs.w_Abeta + (2.5 * kappa_p + 1.5 * ell_p) * coeffs.w_Akappa
    t1 = bilinear(sys.Q, v, turing.E0)
    t2 = (1j * beta_p * kc * B + (kappa_p + 3 * ell_p) * kc * sys.D) @ coeffs.Q1
    return complex((t1 - t2) @ turing.E0_star)
