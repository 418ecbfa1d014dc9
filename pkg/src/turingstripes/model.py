"""Two-component reaction-diffusion-advection model and its linear Turing data.

The model is

    u_t = D Lap u + L u + a_check M u + beta B(c) u_x + Q[u, u] + K[u, u, u]

with ``D = diag(d1, d2)`` and ``B(c) = [[1 + c, 0], [0, c]]``.  Quadratic and
cubic terms are stored as symmetric multilinear tensors; ``Q[i]`` is the 2x2
coefficient matrix of component ``i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from itertools import permutations
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    AsymmetricTensorBeyondSymmetrization,
    ConditionFailed,
    DegenerateKernelChart,
    InconsistentPolynomialTensor,
    LambdaMZero,
    NonPositiveDiffusion,
    NoTuringWavenumber,
)

__all__ = [
    "SystemSpec",
    "TuringData",
    "TuringReport",
    "advection_matrix",
    "bilinear",
    "critical_wavenumber",
    "designed_example",
    "dispersion",
    "hom_instability_threshold",
    "kernel_eigenvectors",
    "klausmeier",
    "klausmeier_steady_state",
    "klausmeier_turing_rainfall",
    "linear_coeffs",
    "polynomial_tensors",
    "shift_polynomial",
    "trilinear",
    "validate_system",
    "verify_turing",
]

Poly = Mapping[tuple[int, int], float]

ALGEBRAIC_TOL = 1e-10


# -- multilinear helpers --------------------------------------------------------

def bilinear(Q: np.ndarray, a, b) -> np.ndarray:
    """Evaluate Q[a, b]; complex arguments are handled without conjugation."""
    return np.einsum("ijk,j,k->i", Q, np.asarray(a), np.asarray(b))


def trilinear(K: np.ndarray, a, b, c) -> np.ndarray:
    return np.einsum("ijkl,j,k,l->i", K, np.asarray(a), np.asarray(b), np.asarray(c))


def _symmetrize(T: np.ndarray) -> np.ndarray:
    """Average over all permutations of the argument slots (axis 0 is the component)."""
    nargs = T.ndim - 1
    perms = list(permutations(range(1, nargs + 1)))
    out = sum(np.transpose(T, (0, *p)) for p in perms)
    return out / len(perms)


def advection_matrix(c: float) -> np.ndarray:
    return np.array([[1.0 + c, 0.0], [0.0, c]])


# -- polynomial input ----------------------------------------------------------

def shift_polynomial(poly: Poly, base: Sequence[float]) -> dict[tuple[int, int], float]:
    """Re-expand ``sum c_ij u^i v^j`` about ``(u, v) = base``."""
    u0, v0 = base
    out: dict[tuple[int, int], float] = {}
    for (i, j), cij in poly.items():
        for p in range(i + 1):
            for r in range(j + 1):
                w = cij * math.comb(i, p) * math.comb(j, r) * u0 ** (i - p) * v0 ** (j - r)
                out[(p, r)] = out.get((p, r), 0.0) + w
    return out


def polynomial_tensors(polys: Sequence[Poly]):
    """Split per-component polynomials (already centred at the base state) into
    ``(constant, L, Q, K)``; Q and K are the symmetric polarizations."""
    const = np.zeros(2)
    L = np.zeros((2, 2))
    Q = np.zeros((2, 2, 2))
    K = np.zeros((2, 2, 2, 2))
    for comp, poly in enumerate(polys):
        for (i, j), cij in poly.items():
            deg = i + j
            if deg == 0:
                const[comp] += cij
            elif deg == 1:
                L[comp, 0 if i else 1] += cij
            elif deg == 2:
                idx = (0,) * i + (1,) * j
                for perm in set(permutations(idx)):
                    Q[(comp, *perm)] += cij / math.comb(2, i)
            elif deg == 3:
                idx = (0,) * i + (1,) * j
                for perm in set(permutations(idx)):
                    K[(comp, *perm)] += cij / math.comb(3, i)
            elif cij != 0.0:
                raise InconsistentPolynomialTensor(
                    f"monomial u^{i} v^{j} has degree {deg} > 3")
    return const, L, Q, K


def _eval_poly(poly: Poly, u, v, degree: int):
    return sum(c * u**i * v**j for (i, j), c in poly.items() if i + j == degree)


# -- the system -----------------------------------------------------------------

@dataclass(frozen=True)
class SystemSpec:
    """Model data.  Use :func:`validate_system` (or the presets) to obtain a
    normalized instance with symmetrized tensors."""

    d1: float
    d2: float
    L: np.ndarray
    M: np.ndarray = field(default_factory=lambda: np.eye(2))
    Q: np.ndarray = field(default_factory=lambda: np.zeros((2, 2, 2)))
    K: np.ndarray = field(default_factory=lambda: np.zeros((2, 2, 2, 2)))
    reaction_poly: tuple | None = None
    name: str = "custom"
    validated: bool = False

    @property
    def D(self) -> np.ndarray:
        return np.diag([self.d1, self.d2])

    @classmethod
    def from_polynomial(cls, d1, d2, polys: Sequence[Poly], M=None, name="custom"):
        """Build from per-component polynomials in the deviation from the base
        state (no constant terms)."""
        const, L, Q, K = polynomial_tensors(polys)
        if np.any(np.abs(const) > ALGEBRAIC_TOL * (1.0 + np.abs(L).max())):
            raise InconsistentPolynomialTensor(
                f"base state is not a steady state: reaction there is {const}")
        return validate_system(cls(
            d1=float(d1), d2=float(d2), L=L, M=np.eye(2) if M is None else np.asarray(M, float),
            Q=Q, K=K, reaction_poly=tuple(dict(p) for p in polys), name=name))


def validate_system(spec: SystemSpec) -> SystemSpec:
    """Check positivity of diffusion, symmetrize the tensors and cross-check
    them against ``reaction_poly`` when both are given."""
    if not (spec.d1 > 0 and spec.d2 > 0):
        raise NonPositiveDiffusion(f"diffusion must be positive, got d1={spec.d1}, d2={spec.d2}")
    L = np.asarray(spec.L, dtype=float).reshape(2, 2)
    M = np.asarray(spec.M, dtype=float).reshape(2, 2)
    Q_raw = np.asarray(spec.Q, dtype=float).reshape(2, 2, 2)
    K_raw = np.asarray(spec.K, dtype=float).reshape(2, 2, 2, 2)
    Q = _symmetrize(Q_raw)
    K = _symmetrize(K_raw)

    # the quadratic / cubic forms on the diagonal are unchanged by symmetrization
    rng = np.random.default_rng(12345)
    for _ in range(4):
        x = rng.standard_normal(2)
        if not (np.allclose(bilinear(Q, x, x), bilinear(Q_raw, x, x), rtol=1e-12, atol=1e-12)
                and np.allclose(trilinear(K, x, x, x), trilinear(K_raw, x, x, x),
                                rtol=1e-12, atol=1e-12)):
            raise AsymmetricTensorBeyondSymmetrization("symmetrization altered Q[x,x] or K[x,x,x]")

        if spec.reaction_poly is not None:
            u, v = x
            for comp, poly in enumerate(spec.reaction_poly):
                q_poly = _eval_poly(poly, u, v, 2)
                k_poly = _eval_poly(poly, u, v, 3)
                if (abs(q_poly - bilinear(Q, x, x)[comp]) > 1e-12 * (1 + abs(q_poly))
                        or abs(k_poly - trilinear(K, x, x, x)[comp]) > 1e-12 * (1 + abs(k_poly))):
                    raise InconsistentPolynomialTensor(
                        f"component {comp}: polynomial and tensor input disagree")
    return replace(spec, d1=float(spec.d1), d2=float(spec.d2), L=L, M=M, Q=Q, K=K, validated=True)


def _valid(sys: SystemSpec) -> SystemSpec:
    return sys if sys.validated else validate_system(sys)


# -- presets --------------------------------------------------------------------

def designed_example(epsilon: float = 0.4) -> SystemSpec:
    """The designed example with quadratic strength ``epsilon``."""
    polys = (
        {(1, 0): 3.0, (0, 1): -1.0, (2, 0): epsilon, (0, 2): epsilon / 4, (1, 2): -1.0},
        {(1, 0): 14.0, (0, 1): -3.5, (2, 0): epsilon, (0, 2): epsilon / 4, (1, 2): 1.0},
    )
    M = np.array([[1.0, 4.0], [-0.2, 1.0]])
    return SystemSpec.from_polynomial(1.0, 3.5, polys, M=M, name="designed_example")


def klausmeier_steady_state(a: float, m: float = 0.45) -> tuple[float, float]:
    """Vegetated homogeneous state ``(u, v)`` on the branch with larger v."""
    disc = a * a - 4 * m * m
    if disc < 0:
        raise NoTuringWavenumber(f"no vegetated steady state for a={a} < 2m={2 * m}")
    v = (a + math.sqrt(disc)) / (2 * m)
    return m / v, v


def klausmeier(a: float, m: float = 0.45, d: float = 500.0) -> SystemSpec:
    """Extended Klausmeier model centred at its vegetated steady state.

    ``u_t = d Lap u + beta u_x + a - u - u v^2``, ``v_t = Lap v - m v + u v^2``.
    """
    u0, v0 = klausmeier_steady_state(a, m)
    f1 = {(0, 0): a, (1, 0): -1.0, (1, 2): -1.0}
    f2 = {(0, 1): -m, (1, 2): 1.0}
    polys = tuple(shift_polynomial(f, (u0, v0)) for f in (f1, f2))
    for p in polys:
        p.pop((0, 0), None)
    sys = SystemSpec.from_polynomial(d, 1.0, polys, name="klausmeier")
    return replace(sys, name=f"klausmeier(a={a!r}, m={m!r}, d={d!r})")


def klausmeier_turing_rainfall(m: float = 0.45, d: float = 500.0) -> float:
    """Rainfall ``a_T`` at which the vegetated state of :func:`klausmeier` is at a
    Turing point: the quadratic ``det(-s D + L(a))`` acquires a double root."""
    from scipy.optimize import brentq

    def parts(a):
        sys = klausmeier(a, m, d)
        (a1, a2), (a3, a4) = sys.L
        b = sys.d1 * a4 + sys.d2 * a1
        return b, b * b - 4 * sys.d1 * sys.d2 * (a1 * a4 - a2 * a3)

    def disc(a):
        return parts(a)[1]

    # the largest a with a double root at positive s
    grid = np.linspace(20.0, 2 * m + 1e-9, 400)
    vals = [disc(a) for a in grid]
    for hi, lo, fhi, flo in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if (fhi > 0) != (flo > 0):
            root = float(brentq(disc, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps))
            if parts(root)[0] > 0:
                return root
    raise NoTuringWavenumber(f"no Turing point for m={m}, d={d}")


# -- dispersion relation --------------------------------------------------------

def dispersion(sys: SystemSpec, lam: complex, k: float, l: float = 0.0,
               alpha_check: float = 0.0, beta: float = 0.0, c: float | None = None) -> complex:
    """``det(-(k^2+l^2) D + L + a_check M + i k beta B(c) - lam Id)``.

    ``c`` defaults to ``-lambda_beta`` (comoving frame of the stripe at onset).
    """
    sys = _valid(sys)
    if c is None:
        c = -_lambda_beta(sys)
    A = (-(k * k + l * l) * sys.D + sys.L + alpha_check * sys.M
         + 1j * k * beta * advection_matrix(c) - lam * np.eye(2))
    return complex(A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0])


def critical_wavenumber(sys: SystemSpec) -> float:
    (a1, _), (_, a4) = sys.L
    num = sys.d1 * a4 + sys.d2 * a1
    if num <= 0:
        raise NoTuringWavenumber(f"d1*a4 + d2*a1 = {num} <= 0")
    return math.sqrt(num / (2 * sys.d1 * sys.d2))


def _lambda_beta(sys: SystemSpec) -> float:
    kc2 = critical_wavenumber(sys) ** 2
    (a1, _), (_, a4) = sys.L
    return (a4 - kc2 * sys.d2) / (a1 + a4 - kc2 * (sys.d1 + sys.d2))


@dataclass(frozen=True)
class TuringReport:
    trace_negative_det_positive: bool
    critical_only_on_circle: bool
    simple_root: bool
    kc: float
    discriminant: float
    dlambda: float
    identity_residual: float

    @property
    def ok(self) -> bool:
        return self.trace_negative_det_positive and self.critical_only_on_circle and self.simple_root


def verify_turing(sys: SystemSpec, *, raise_on_failure: bool = True,
                  rtol: float = ALGEBRAIC_TOL) -> TuringReport:
    """Check the three Turing conditions at ``a_check = beta = 0``.

    Condition (2) uses that ``det(-s D + L)`` is a quadratic in ``s = k^2 + l^2``:
    it must have a double root at ``s = kc^2`` and be positive elsewhere.
    """
    sys = _valid(sys)
    (a1, a2), (a3, a4) = sys.L
    d1, d2 = sys.d1, sys.d2
    tr, det = a1 + a4, a1 * a4 - a2 * a3
    cond1 = tr < 0 and det > 0
    if raise_on_failure and not cond1:
        raise ConditionFailed(1, tr if tr >= 0 else det, f"L not stable: tr={tr}, det={det}")

    b = d1 * a4 + d2 * a1
    if b <= 0:
        if raise_on_failure:
            raise ConditionFailed(2, b, "d1*a4 + d2*a1 <= 0: no positive critical wavenumber")
        return TuringReport(cond1, False, False, float("nan"), float("nan"), float("nan"), float("nan"))
    kc = critical_wavenumber(sys)
    kc2 = kc * kc
    disc = b * b - 4 * d1 * d2 * det
    cond2 = abs(disc) <= rtol * b * b
    if raise_on_failure and not cond2:
        raise ConditionFailed(2, disc, f"det(-sD+L) is not a perfect square in s: discriminant={disc}")

    dlam = -(a1 + a4 - kc2 * (d1 + d2))
    cond3 = abs(dlam) > rtol * (abs(a1) + abs(a4) + kc2 * (d1 + d2))
    if raise_on_failure and not cond3:
        raise ConditionFailed(3, dlam, "d_lambda d vanishes at the critical point")
    ident = a2 * a3 - (a1 - kc2 * d1) * (a4 - kc2 * d2)
    return TuringReport(cond1, cond2, cond3, kc, disc, dlam, ident)


# -- kernel data ----------------------------------------------------------------

def kernel_eigenvectors(sys: SystemSpec, sign: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Kernel and adjoint kernel vectors of ``-kc^2 D + L`` with
    ``<E0, E0> = 1`` and ``<E0, E0*> = 1``.  ``sign=-1`` flips both."""
    sys = _valid(sys)
    kc2 = critical_wavenumber(sys) ** 2
    (b1, b2), (b3, b4) = -kc2 * sys.D + sys.L
    if b1 == 0 or b1 + b4 == 0:
        raise DegenerateKernelChart(f"b1={b1}, b1+b4={b1 + b4}")
    c0 = math.hypot(b2, b1)
    c0s = (b1 * b4 + b1 * b1) / c0
    E0 = np.array([b2, -b1]) / c0
    E0s = np.array([b3, -b1]) / c0s
    if sign < 0:
        E0, E0s = -E0, -E0s
    return E0, E0s


@dataclass(frozen=True)
class TuringData:
    kc: float
    E0: np.ndarray
    E0_star: np.ndarray
    lambda_beta: float
    lambda_betabeta: float
    lambda_M: float
    lambda_Mbeta: float
    a_M: int
    rho_beta: float
    rho_kappa: float
    sign: int = 1

    @property
    def c(self) -> float:
        """Leading-order velocity parameter of the comoving frame."""
        return -self.lambda_beta


def linear_coeffs(sys: SystemSpec, sign: int = 1) -> TuringData:
    sys = _valid(sys)
    verify_turing(sys)
    kc = critical_wavenumber(sys)
    kc2 = kc * kc
    (a1, a2), (a3, a4) = sys.L
    d1, d2 = sys.d1, sys.d2
    tr = a1 + a4 - kc2 * (d1 + d2)
    lam_b = (a4 - kc2 * d2) / tr
    lam_bb = (a1 - kc2 * d1) * (a4 - kc2 * d2) / tr**3
    if not lam_bb > 0:
        raise ConditionFailed(2, lam_bb, f"lambda_betabeta = {lam_bb} is not positive")
    (m11, m12), (m21, m22) = sys.M
    lam_M = (m11 * (a4 - kc2 * d2) - m12 * a3 - m21 * a2 + m22 * (a1 - kc2 * d1)) / tr
    if lam_M == 0:
        raise LambdaMZero("lambda_M = 0: the unfolding does not move the critical eigenvalue")
    lam_Mb = kc * (m22 - lam_M - (2 * lam_M - m11 - m22) * lam_b) / (lam_M * tr)
    a_M = 0 if np.array_equal(sys.M, np.eye(2)) else 1
    # d(0, k, 0) = d1 d2 k^4 - 2 d1 d2 kc^2 k^2 + det L  =>  d_k^2 d = 8 d1 d2 kc^2 at kc
    rho_kappa = -(8 * d1 * d2 * kc2) / (2 * (-tr))
    E0, E0s = kernel_eigenvectors(sys, sign)
    return TuringData(kc=kc, E0=E0, E0_star=E0s, lambda_beta=lam_b, lambda_betabeta=lam_bb,
                      lambda_M=lam_M, lambda_Mbeta=lam_Mb, a_M=a_M, rho_beta=kc2 * lam_bb,
                      rho_kappa=rho_kappa, sign=sign)


def hom_instability_threshold(turing: TuringData, beta: float, mode: str = "stripe") -> float:
    """Value of ``alpha`` at which the homogeneous state loses stability to the
    lattice modes of the given kind."""
    onset = -turing.kc**2 * turing.lambda_betabeta * beta**2
    if mode == "stripe":
        return onset
    if mode == "hex":
        return onset / 4
    if mode == "square":
        return 0.0
    raise ValueError(f"unknown mode {mode!r}")
