"""Closed-form stability boundaries, thresholds and region classification.

Everything here is leading order in the unscaled parameters ``alpha``,
``beta``, ``kappa_tilde`` and the quadratic coefficient ``q``.  Boundaries are
graphs ``alpha = f(abscissa)``; classification always uses eigenvalue signs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .coefficients import CoefficientSet
from .errors import ConfigError, GridTooFine, NoStripe, ThetaOutOfRange
from .model import TuringData

__all__ = [
    "DiagramGrid",
    "EIGEN_NAMES",
    "FLAG_NAMES",
    "PLANES",
    "RegionLabel",
    "ThresholdSet",
    "bifurcation_alpha",
    "classify_arrays",
    "classify_point",
    "diagram_grid",
    "eckhaus_alpha",
    "hex_boundaries",
    "hex_eigen_leading",
    "hex_thresholds",
    "leading_eigen_arrays",
    "quasihex_boundaries",
    "quasihex_eigen_leading",
    "quasihex_thresholds",
    "square_alpha",
    "square_eigen_leading",
    "zigzag_unstable",
]

FLAG_NAMES = ("exists", "zigzag", "eckhaus", "square", "hex", "quasihex", "stable")
PLANES = ("kappa_alpha", "q_alpha", "beta_alphatilde", "epsilon_alpha")
MAX_CELLS = 10**7
MARGINAL_TOL = 1e-14


def _check_theta(theta):
    if not (0.0 < theta <= 1.0):
        raise ThetaOutOfRange(f"theta must lie in (0, 1], got {theta}")


# -- existence and 1D instabilities ----------------------------------------------------

def bifurcation_alpha(turing: TuringData, kappa_tilde, beta):
    return -(turing.rho_kappa * np.square(kappa_tilde) + turing.rho_beta * np.square(beta))


def eckhaus_alpha(turing: TuringData, kappa_tilde, beta):
    return -(3 * turing.rho_kappa * np.square(kappa_tilde) + turing.rho_beta * np.square(beta))


def zigzag_unstable(kappa_tilde):
    """Stretched stripes (``kappa_tilde < 0``) are zigzag-unstable; zero is marginal."""
    return np.asarray(kappa_tilde) < 0 if np.ndim(kappa_tilde) else bool(kappa_tilde < 0)


# -- quasi-square -------------------------------------------------------------------

def square_alpha(turing: TuringData, kappa_tilde, beta, ell_tilde=0.0):
    rb, rk = turing.rho_beta, turing.rho_kappa
    return -2 * rb * np.square(beta) + rk * (np.square(ell_tilde) - 2 * np.square(kappa_tilde))


def square_eigen_leading(turing: TuringData, alpha, beta, kappa_tilde, ell_tilde=0.0):
    return square_alpha(turing, kappa_tilde, beta, ell_tilde) - alpha


# -- hexagonal ----------------------------------------------------------------------

def _A_tilde_sq(coeffs, turing, alpha, beta, kappa_tilde):
    return -(alpha - bifurcation_alpha(turing, kappa_tilde, beta)) / (3 * coeffs.k0)


def hex_eigen_leading(coeffs: CoefficientSet, turing: TuringData, alpha, beta, kappa_tilde,
                      q_eff) -> tuple[float, float]:
    At2 = _A_tilde_sq(coeffs, turing, alpha, beta, kappa_tilde)
    if At2 < 0:
        raise NoStripe(f"no stripe at alpha={alpha}, beta={beta}, kappa_tilde={kappa_tilde}")
    At = math.sqrt(At2)
    base = 3 * coeffs.k0 * At2 - 0.75 * turing.rho_beta * beta**2
    return base - 2 * At * abs(q_eff), base + 2 * At * abs(q_eff)


def _pm_boundaries(base, k0, q, delta):
    valid = delta >= 0
    root = np.sqrt(np.where(valid, delta, 0.0))
    plus = base - (2 * q**2 + root) / (3 * k0)
    minus = base - (2 * q**2 - root) / (3 * k0)
    return np.where(valid, plus, np.nan), np.where(valid, minus, np.nan), valid


def hex_boundaries(coeffs: CoefficientSet, turing: TuringData, kappa_tilde, beta, q_eff) -> dict:
    """Hex-stability boundaries ``alpha = H_+/-``; ``valid`` is false where the
    discriminant is negative (no real boundary)."""
    k0, rb, rk = coeffs.k0, turing.rho_beta, turing.rho_kappa
    q = np.asarray(q_eff, float)
    beta = np.asarray(beta, float)
    delta = 4 * q**4 + 9 * k0 * q**2 * rb * beta**2
    base = -1.75 * rb * beta**2 - rk * np.square(kappa_tilde)
    plus, minus, valid = _pm_boundaries(base, k0, q, delta)
    return {"H_plus": plus, "H_minus": minus, "delta_H": delta, "valid": valid}


def hex_thresholds(coeffs: CoefficientSet, turing: TuringData, beta, q_eff) -> dict:
    k0, rb = coeffs.k0, turing.rho_beta
    q = abs(q_eff)
    root = math.sqrt(-k0 * rb)

    def H_tilde(b):
        b = np.asarray(b, float)
        delta = 4 * q**4 + 9 * k0 * q**2 * rb * b**2
        plus, minus, valid = _pm_boundaries(-0.75 * rb * b**2, k0, q, delta)
        return plus, minus

    return {
        "q_tp": 1.5 * abs(beta) * root,
        "alpha_tp": -0.25 * rb * beta**2,
        "beta_tp": 2 * q / (3 * root),
        "H_tilde": H_tilde,
    }


# -- quasi-hexagonal ----------------------------------------------------------------

def quasihex_eigen_leading(coeffs: CoefficientSet, turing: TuringData, alpha, beta, kappa_tilde,
                           theta, q_eff) -> tuple[float, float]:
    _check_theta(theta)
    lo, hi = hex_eigen_leading(coeffs, turing, alpha, beta, kappa_tilde, q_eff)
    omega = -theta * turing.rho_kappa * kappa_tilde**2
    return lo + omega, hi + omega


def quasihex_boundaries(coeffs: CoefficientSet, turing: TuringData, kappa_tilde, beta, q_eff,
                        theta) -> dict:
    _check_theta(theta)
    k0, rb, rk = coeffs.k0, turing.rho_beta, turing.rho_kappa
    q = np.asarray(q_eff, float)
    beta = np.asarray(beta, float)
    k2 = np.square(kappa_tilde)
    M_qh = -1.75 * rb * beta**2 - (theta + 1) * rk * k2
    delta = 4 * q**4 + 9 * k0 * rb * beta**2 * q**2 + 12 * k0 * theta * rk * k2 * q**2
    plus, minus, valid = _pm_boundaries(M_qh, k0, q, delta)
    return {"M_qh": M_qh, "M_qH_plus": plus, "M_qH_minus": minus, "delta_M": delta, "valid": valid}


@dataclass(frozen=True)
class ThresholdSet:
    """Thresholds at fixed ``(kappa_tilde, beta, q, theta)``; NaN entries have
    ``valid[name] = False``."""

    q_tp: float
    alpha_tp: float
    beta_tp: float
    q_tp_theta: float
    alpha_tp_theta: float
    beta_ep: float
    beta_ex: float
    q_ex: float
    kappa_ep: float
    alpha_ep: float
    kappa_mp: float
    alpha_mp: float
    alpha_sec: float
    alpha_sec_beta_pm: tuple[float, float]
    valid: dict = field(default_factory=dict)


def _sqrt_or_nan(x):
    return math.sqrt(x) if x >= 0 else float("nan")


def quasihex_thresholds(coeffs: CoefficientSet, turing: TuringData, kappa_tilde, beta, q_eff,
                        theta) -> ThresholdSet:
    _check_theta(theta)
    k0, rb, rk = coeffs.k0, turing.rho_beta, turing.rho_kappa
    q2 = q_eff * q_eff
    b2, kt2 = beta * beta, kappa_tilde * kappa_tilde
    hexd = hex_thresholds(coeffs, turing, beta, q_eff)
    r_qtp = -12 * k0 * theta * rk * kt2 - 9 * k0 * rb * b2
    r_ep = -theta * rk / (3 * rb)
    r_ex = 2 / (k0 * (theta - 2) * rb)
    r_qex = -k0 * (2 - theta) * rb / 2
    r_kep = -3 * rb / (4 * theta * rk)
    r_kmp = -3 * rb * b2 / (4 * theta * rk) - q2 / (3 * k0 * theta * rk)
    r_sec = 16 * q2 * q2 + 18 * k0 * (2 - theta) * q2 * rb * b2
    pref = -1 / (4 * k0 * (2 - theta) ** 2)
    lin = 16 * q2 + k0 * rb * b2 * (4 * theta**2 - 25 * theta + 34)
    sec_root = _sqrt_or_nan(r_sec)
    values = dict(
        q_tp=hexd["q_tp"], alpha_tp=hexd["alpha_tp"], beta_tp=hexd["beta_tp"],
        q_tp_theta=0.5 * _sqrt_or_nan(r_qtp),
        alpha_tp_theta=-0.25 * rb * b2 + (theta - 1) * rk * kt2,
        beta_ep=2 * abs(kappa_tilde) * _sqrt_or_nan(r_ep),
        beta_ex=(2 / 3) * abs(q_eff) * _sqrt_or_nan(r_ex),
        q_ex=1.5 * abs(beta) * _sqrt_or_nan(r_qex),
        kappa_ep=abs(beta) * _sqrt_or_nan(r_kep),
        alpha_ep=(3 / (4 * theta) - 1) * rb * b2,
        kappa_mp=_sqrt_or_nan(r_kmp),
        alpha_mp=(4 * q2 * (1 - theta) + 3 * k0 * (3 - 4 * theta) * rb * b2) / (12 * k0 * theta),
        alpha_sec=-8 * q2 / (k0 * (2 - theta) ** 2),
    )
    sec = (pref * (lin + 4 * sec_root), pref * (lin - 4 * sec_root))
    valid = {k: bool(np.isfinite(v)) for k, v in values.items()}
    valid["alpha_sec_beta_pm"] = bool(np.isfinite(sec_root))
    return ThresholdSet(alpha_sec_beta_pm=sec, valid=valid, **values)


# -- classification -----------------------------------------------------------------

@dataclass(frozen=True)
class RegionLabel:
    exists: bool
    zigzag_unstable: bool
    eckhaus_unstable: bool
    square_unstable: bool
    hex_unstable: bool
    quasihex_unstable: bool
    stable_all_checked: bool
    marginal: bool = False

    def as_row(self) -> tuple[int, ...]:
        return tuple(int(v) for v in (self.exists, self.zigzag_unstable, self.eckhaus_unstable,
                                       self.square_unstable, self.hex_unstable,
                                       self.quasihex_unstable, self.stable_all_checked))


EIGEN_NAMES = ("bifurcation_margin", "eckhaus_margin", "square", "hex", "quasihex")


def leading_eigen_arrays(coeffs: CoefficientSet, turing: TuringData, alpha, beta, kappa_tilde, q_eff,
                         theta: float = 1.0, ell_tilde_square: float = 0.0) -> dict:
    """Leading-order instability indicators keyed by :data:`EIGEN_NAMES`.

    ``bifurcation_margin = alpha - B`` (stripes exist iff nonnegative),
    ``eckhaus_margin = alpha - E`` (Eckhaus-unstable iff negative); the other
    entries are the leading critical eigenvalues (zero where no stripe exists).
    """
    _check_theta(theta)
    alpha, beta, kt, q = np.broadcast_arrays(*(np.asarray(v, float) for v in (alpha, beta, kappa_tilde, q_eff)))
    k0, rb, rk = coeffs.k0, turing.rho_beta, turing.rho_kappa
    B = bifurcation_alpha(turing, kt, beta)
    exists = alpha >= B
    At2 = np.where(exists, -(alpha - B) / (3 * k0), 0.0)
    At = np.sqrt(At2)
    base = 3 * k0 * At2 - 0.75 * rb * beta**2
    lam_hex = base + 2 * At * np.abs(q)
    return {
        "bifurcation_margin": alpha - B,
        "eckhaus_margin": alpha - eckhaus_alpha(turing, kt, beta),
        "square": np.where(exists, square_eigen_leading(turing, alpha, beta, kt, ell_tilde_square), 0.0),
        "hex": np.where(exists, lam_hex, 0.0),
        "quasihex": np.where(exists, lam_hex - theta * rk * kt**2, 0.0),
    }


def classify_arrays(coeffs: CoefficientSet, turing: TuringData, alpha, beta, kappa_tilde, q_eff,
                    theta: float = 1.0, ell_tilde_square: float = 0.0) -> dict:
    """Vectorized classifier; inputs broadcast.  Returns boolean arrays keyed by
    :data:`FLAG_NAMES` plus ``marginal``."""
    lam = leading_eigen_arrays(coeffs, turing, alpha, beta, kappa_tilde, q_eff, theta, ell_tilde_square)
    alpha, beta, kt, q = np.broadcast_arrays(*(np.asarray(v, float) for v in (alpha, beta, kappa_tilde, q_eff)))
    rb, rk = turing.rho_beta, turing.rho_kappa
    exists = lam["bifurcation_margin"] >= 0
    lam_eh, lam_sq, lam_hex, lam_qh = lam["eckhaus_margin"], lam["square"], lam["hex"], lam["quasihex"]

    scale = np.maximum.reduce([np.abs(alpha), rb * beta**2, np.abs(rk) * kt**2, q**2, np.full_like(alpha, 1e-300)])
    tol = MARGINAL_TOL * scale
    flags = {
        "exists": exists,
        "zigzag": exists & (kt < 0),
        "eckhaus": exists & (lam_eh < -tol),
        "square": exists & (lam_sq > tol),
        "hex": exists & (lam_hex > tol),
        "quasihex": exists & (lam_qh > tol),
    }
    unstable = flags["zigzag"] | flags["eckhaus"] | flags["square"] | flags["hex"] | flags["quasihex"]
    flags["stable"] = exists & ~unstable
    flags["marginal"] = exists & ((kt == 0) | (np.abs(lam_eh) <= tol) | (np.abs(lam_sq) <= tol)
                                  | (np.abs(lam_hex) <= tol) | (np.abs(lam_qh) <= tol)
                                  | (lam["bifurcation_margin"] == 0))
    return flags


def classify_point(coeffs: CoefficientSet, turing: TuringData, alpha, beta, kappa_tilde, q_eff,
                   theta: float = 1.0, ell_tilde_square: float = 0.0) -> RegionLabel:
    f = classify_arrays(coeffs, turing, alpha, beta, kappa_tilde, q_eff, theta, ell_tilde_square)
    g = {k: bool(v) for k, v in f.items()}
    return RegionLabel(g["exists"], g["zigzag"], g["eckhaus"], g["square"], g["hex"], g["quasihex"],
                       g["stable"], g["marginal"])


# -- parameter-plane diagrams --------------------------------------------------------

@dataclass
class DiagramGrid:
    """Flags on a rectangular grid (``flags[name][iy, ix]``) plus boundary
    polylines ``name -> (x, y)`` sampled on the abscissa grid (NaN where invalid)."""

    plane: str
    x: np.ndarray
    y: np.ndarray
    flags: dict
    polylines: dict
    x_label: str = "x"
    y_label: str = "y"
    params: dict = field(default_factory=dict)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.y), len(self.x))


def _axis(spec) -> np.ndarray:
    if spec is None:
        return np.empty(0)
    lo, hi, n = spec
    n = int(n)
    if n <= 0:
        return np.empty(0)
    if not (np.isfinite(lo) and np.isfinite(hi)):
        raise ConfigError("grid bounds must be finite")
    return np.linspace(float(lo), float(hi), n)


def diagram_grid(coeffs: CoefficientSet, turing: TuringData, plane: str, fixed: dict,
                 x_spec=None, y_spec=None, max_cells: int = MAX_CELLS) -> DiagramGrid:
    """Classify a parameter plane.

    Parameters
    ----------
    plane
        ``kappa_alpha`` (x = kappa_tilde), ``q_alpha`` (x = q),
        ``beta_alphatilde`` (x = beta, y = alpha - B), ``epsilon_alpha``
        (x = eps with ``q = q_slope * eps``).
    fixed
        Values of the remaining parameters: ``beta``, ``kappa_tilde``, ``q``,
        ``q_slope``, ``theta`` (default 1), ``ell_tilde_square`` (default 0).
    x_spec, y_spec
        ``(min, max, count)``; ``None`` or a zero count gives an empty axis.
    """
    if plane not in PLANES:
        raise ConfigError(f"unknown plane {plane!r}; expected one of {PLANES}")
    xs, ys = _axis(x_spec), _axis(y_spec)
    if xs.size * ys.size > max_cells:
        raise GridTooFine(f"{xs.size * ys.size} cells exceed the cap {max_cells}")
    theta = float(fixed.get("theta", 1.0))
    ell_sq = float(fixed.get("ell_tilde_square", 0.0))
    _check_theta(theta)
    X, Y = np.meshgrid(xs, ys)

    beta = float(fixed.get("beta", 0.0))
    kt = float(fixed.get("kappa_tilde", 0.0))
    q = float(fixed.get("q", coeffs.q))
    if plane == "kappa_alpha":
        a_kt, a_beta, a_q, alpha = X, beta, q, Y
        ab = dict(kappa_tilde=xs, beta=beta, q=q)
        labels = ("kappa_tilde", "alpha")
    elif plane == "q_alpha":
        a_kt, a_beta, a_q, alpha = kt, beta, X, Y
        ab = dict(kappa_tilde=kt, beta=beta, q=xs)
        labels = ("q", "alpha")
    elif plane == "beta_alphatilde":
        a_kt, a_beta, a_q = kt, X, q
        alpha = Y + bifurcation_alpha(turing, kt, X)
        ab = dict(kappa_tilde=kt, beta=xs, q=q)
        labels = ("beta", "alpha_tilde")
    else:
        slope = float(fixed.get("q_slope", coeffs.q))
        a_kt, a_beta, a_q, alpha = kt, beta, slope * X, Y
        ab = dict(kappa_tilde=kt, beta=beta, q=slope * xs)
        labels = ("epsilon", "alpha")

    if X.size:
        flags = classify_arrays(coeffs, turing, alpha, a_beta, a_kt, a_q, theta, ell_sq)
    else:
        flags = {k: np.zeros(X.shape, bool) for k in (*FLAG_NAMES, "marginal")}

    poly = {}
    if xs.size:
        k_ab, b_ab, q_ab = (np.broadcast_to(np.asarray(ab[n], float), xs.shape)
                            for n in ("kappa_tilde", "beta", "q"))
        shift = bifurcation_alpha(turing, k_ab, b_ab) if plane == "beta_alphatilde" else 0.0
        hb = hex_boundaries(coeffs, turing, k_ab, b_ab, q_ab)
        mb = quasihex_boundaries(coeffs, turing, k_ab, b_ab, q_ab, theta)
        curves = {
            "bifurcation": bifurcation_alpha(turing, k_ab, b_ab),
            "eckhaus": eckhaus_alpha(turing, k_ab, b_ab),
            "square": square_alpha(turing, k_ab, b_ab, ell_sq),
            "hex_plus": hb["H_plus"], "hex_minus": hb["H_minus"],
            "quasihex_plus": mb["M_qH_plus"], "quasihex_minus": mb["M_qH_minus"],
        }
        poly = {k: (xs.copy(), np.asarray(v - shift, float)) for k, v in curves.items()}
    return DiagramGrid(plane, xs, ys, flags, poly, *labels,
                       params=dict(fixed, theta=theta, ell_tilde_square=ell_sq))
