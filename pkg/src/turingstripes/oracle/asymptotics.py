"""Convergence of lattice eigenvalues to the leading-order blocks as eps -> 0."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import linear_sum_assignment

from ..blocks import block_L1, block_L2_hex, block_L2_quasihex, block_L2_square
from ..coefficients import compute_coefficients, quadratic_coeffs, stripe_amplitude
from ..errors import CalibrationAmbiguous, ConfigError, MatchingFailure
from ..model import SystemSpec, _valid, linear_coeffs
from .lattice import LatticeSpec, lattice_linearization
from .stripe import solve_stripe_1d

__all__ = ["SCENARIOS", "ConvergenceReport", "Scenario", "calibrate_q_convention", "compare_asymptotics",
           "hypothesis_scaled"]

DEFAULT_EPS = (0.05, 0.025, 0.0125)
ORDER_THRESHOLD = 2.5
TRANSLATION_TOL = 1e-8
AMBIGUITY_FACTOR = 10.0


@dataclass(frozen=True)
class Scenario:
    """Scaled parameters ``(alpha', beta', kappa_tilde')`` and the lattice."""

    lattice: str
    alpha_p: float = 1.0
    beta_p: float = 0.5
    kappa_p: float = 0.2
    ell_p: float | None = None     # quasi-square / quasi-hex detuning; None = most unstable
    theta: float = 1.0


SCENARIOS = {
    "stripe": Scenario("square", 1.0, 0.5, 0.2, ell_p=2.0),
    "square": Scenario("square", 1.0, 0.5, 0.2, ell_p=0.0),
    "hex": Scenario("hexagonal", 3.0, 1.0, 0.2),
    "quasihex": Scenario("quasihexagonal", 3.0, 1.0, 0.1),
}


@dataclass
class ConvergenceReport:
    scenario: str
    eps: list
    analytic: list                 # per eps: array of 2j analytic eigenvalues
    oracle: list                   # per eps: matched oracle eigenvalues (same order)
    errors: dict                   # label -> list of |error| per eps
    orders: dict                   # label -> list of successive observed orders
    translation: list              # per eps: |translation eigenvalue|
    q_scale: float = 1.0
    labels: list = field(default_factory=list)
    ambiguous: bool = False

    @property
    def min_order(self) -> float:
        vals = [p for v in self.orders.values() for p in v]
        return min(vals) if vals else float("nan")

    @property
    def translation_ok(self) -> bool:
        return all(t <= TRANSLATION_TOL for t in self.translation)

    @property
    def passed(self) -> bool:
        return self.translation_ok and not self.ambiguous and self.min_order >= ORDER_THRESHOLD


def hypothesis_scaled(sys: SystemSpec, eps: float) -> SystemSpec:
    """The system with quadratic part ``eps * Q`` (``sys.Q`` is the O(1) profile)."""
    sys = _valid(sys)
    return replace(sys, Q=eps * sys.Q, reaction_poly=None, name=f"{sys.name}[Q*{eps!r}]")


def _analytic(scn: Scenario, sys, coeffs, turing, A_p, mu_p, eps):
    """Labelled analytic critical eigenvalues (labels repeat for double ones)."""
    A = eps * A_p
    l1 = block_L1(coeffs, A)
    out = [("translation", 0.0), ("L1", l1.eigenvalues[0] if l1.eigenvalues[0] != 0 else l1.eigenvalues[1])]
    if scn.lattice == "square":
        blk = block_L2_square(coeffs, turing, A_p, mu_p, scn.ell_p, eps)
        out += [("square", blk.eigenvalues[0])] * 2
    elif scn.lattice == "hexagonal":
        blk = block_L2_hex(sys, coeffs, turing, A_p, mu_p, eps)
        out += [("hex-", blk.eigenvalues[0])] * 2 + [("hex+", blk.eigenvalues[1])] * 2
    else:
        ell_p = _qh_ell(scn)
        blk = block_L2_quasihex(sys, coeffs, turing, A_p, mu_p, ell_p, eps)
        out += [("quasihex-", blk.eigenvalues[0])] * 2 + [("quasihex+", blk.eigenvalues[1])] * 2
    return out


def _qh_ell(scn: Scenario) -> float:
    if scn.ell_p is not None:
        return scn.ell_p
    from ..blocks import OmegaParam
    return OmegaParam(scn.theta, scn.kappa_p, -1.0).ell_tilde


def _match(oracle: np.ndarray, analytic: list, strict: bool = True):
    vals = np.array([v for _, v in analytic], dtype=complex)
    cost = np.abs(oracle[:, None] - vals[None, :])
    rows, cols = linear_sum_assignment(cost)
    matched = np.empty(len(vals), dtype=complex)
    matched[cols] = oracle[rows]
    # ambiguity: the nearest analytic value with a different label must be well separated
    labels = [lab for lab, _ in analytic]
    ambiguous = False
    for j, (lab, v) in enumerate(analytic):
        d = abs(matched[j] - v)
        others = [abs(matched[j] - w) for (l2, w) in analytic if l2 != lab and abs(w - v) > 1e-14]
        if others and d > 0 and min(others) < AMBIGUITY_FACTOR * d:
            if strict:
                raise MatchingFailure(f"eigenvalue {matched[j]:.6g} matched to {lab}={v:.6g} is not "
                                      f"separated from the other branches")
            ambiguous = True
    return matched, labels, ambiguous


def _oracle_run(sys_eps, scn: Scenario, eps, N, N_lat):
    turing = linear_coeffs(sys_eps)
    coeffs = compute_coefficients(sys_eps, turing)
    alpha, beta, kt = eps**2 * scn.alpha_p, eps * scn.beta_p, eps * scn.kappa_p
    st = stripe_amplitude(coeffs, turing, alpha, beta, kt)
    if st is None:
        raise ConfigError("scenario lies below the bifurcation surface")
    ac = alpha / turing.lambda_M
    kappa = turing.kc + kt
    stripe = solve_stripe_1d(sys_eps, ac, beta, kappa, N)
    if scn.lattice == "square":
        lat = LatticeSpec.build("square", kappa, N_lat, kc=turing.kc, ell_tilde=eps * scn.ell_p)
    elif scn.lattice == "hexagonal":
        lat = LatticeSpec.build("hexagonal", kappa, N_lat)
    else:
        lat = LatticeSpec.build("quasihexagonal", kappa, N_lat, kc=turing.kc, ell_tilde=eps * _qh_ell(scn))
    spec = lattice_linearization(sys_eps, stripe, lat, ac, beta)
    return turing, coeffs, st.A / eps, spec


def compare_asymptotics(sys: SystemSpec, scenario: str | Scenario, eps_list=DEFAULT_EPS, N: int = 32,
                        N_lat: int = 8, q_scales=(1.0,)):
    """Compare matched critical lattice eigenvalues with the analytic blocks.

    ``sys.Q`` is the O(1) quadratic profile; at each ``eps`` the system uses
    ``eps * sys.Q``.  With several ``q_scales`` a list of reports is returned
    (the lattice eigenvalues are computed once) and an ambiguous matching marks
    the report as failed instead of raising :class:`MatchingFailure`.
    """
    name = scenario if isinstance(scenario, str) else "custom"
    if isinstance(scenario, str) and scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}; expected one of {sorted(SCENARIOS)}")
    scn = SCENARIOS[scenario] if isinstance(scenario, str) else scenario
    eps_list = [float(e) for e in eps_list]
    if len(eps_list) < 2 or any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ConfigError("eps_list must contain at least two strictly decreasing values")
    runs = []
    for eps in eps_list:
        sys_eps = hypothesis_scaled(sys, eps)
        runs.append((sys_eps, eps, *_oracle_run(sys_eps, scn, eps, N, N_lat)))
    reports = []
    for g in q_scales:
        analytic_all, matched_all, translation = [], [], []
        errors: dict = {}
        ambiguous = False
        for sys_eps, eps, turing, coeffs, A_p, spec in runs:
            coeffs_g = coeffs.with_q_scale(g)
            mu_p = (scn.alpha_p, scn.beta_p, scn.kappa_p)
            analytic = _analytic(scn, sys_eps, coeffs_g, turing, A_p, mu_p, eps)
            matched, labels, amb = _match(spec.critical_set, analytic, strict=len(q_scales) == 1)
            ambiguous |= amb
            analytic_all.append(np.array([v for _, v in analytic]))
            matched_all.append(matched)
            translation.append(spec.translation_eigenvalue_abs)
            per = {}
            for (lab, v), m in zip(analytic, matched):
                if lab == "translation":
                    continue
                per[lab] = max(per.get(lab, 0.0), abs(m - v))
            for lab, e in per.items():
                errors.setdefault(lab, []).append(e)
        orders = {}
        for lab, es in errors.items():
            orders[lab] = [math.log(es[i] / es[i + 1]) / math.log(eps_list[i] / eps_list[i + 1])
                           if es[i] > 0 and es[i + 1] > 0 else float("inf")
                           for i in range(len(es) - 1)]
        reports.append(ConvergenceReport(name, eps_list, analytic_all, matched_all, errors, orders,
                                         translation, q_scale=g, labels=labels, ambiguous=ambiguous))
    return reports if len(q_scales) > 1 else reports[0]


CANDIDATE_SCALES = (1.0, 0.5)


def calibrate_q_convention(sys: SystemSpec, eps_list=DEFAULT_EPS, N: int = 32, N_lat: int = 8,
                           return_reports: bool = False):
    """Pick the factor ``gamma`` in ``q = gamma * <Q[E0,E0],E0*>`` for which the
    analytic hexagonal eigenvalues converge with order at least 2.5."""
    sys = _valid(sys)
    turing = linear_coeffs(sys)
    q_raw = quadratic_coeffs(sys, turing)["q"]
    if abs(q_raw) < 1e-12:
        raise CalibrationAmbiguous("q vanishes: the hexagonal eigenvalues do not depend on its scale")
    reports = compare_asymptotics(sys, "hex", eps_list, N, N_lat, q_scales=CANDIDATE_SCALES)
    passing = [r.q_scale for r in reports if r.passed]
    if len(passing) != 1:
        detail = ", ".join(f"gamma={r.q_scale}: order {r.min_order:.3f}" for r in reports)
        raise CalibrationAmbiguous(f"{len(passing)} candidate scales pass ({detail})")
    return (passing[0], reports) if return_reports else passing[0]
