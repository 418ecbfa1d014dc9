"""Linearization about a stripe on two-dimensional Fourier lattices."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from ..errors import EigensolveFailure
from ..model import SystemSpec, _valid, advection_matrix
from .stripe import StripeSolution, nonlinear_jacobian_modes

__all__ = ["LatticeSpec", "SpectrumResult", "bloch_matrix", "bloch_spectrum", "lattice_linearization",
           "lattice_matrix"]

TRANSLATION_EXCLUSION = 1e-7
KINDS = ("square", "rectangle", "hexagonal", "rhombic", "quasihexagonal")


@dataclass(frozen=True)
class LatticeSpec:
    kind: str
    K1: np.ndarray
    K2: np.ndarray
    N_lat: int = 8

    @classmethod
    def build(cls, kind: str, kappa: float, N_lat: int = 8, ell: float | None = None,
              kc: float | None = None, ell_tilde: float | None = None) -> "LatticeSpec":
        """Generators for the named lattice.

        ``square``/``rectangle`` use ``K2 = (0, ell)`` (``ell`` defaults to
        ``kc + ell_tilde``).  ``rhombic`` uses ``K2 = (-kappa/2, ell)``;
        ``hexagonal`` fixes ``ell = sqrt(3) kappa / 2``; ``quasihexagonal`` uses
        ``ell = sqrt(3) (kc + ell_tilde) / 2`` when ``ell_tilde`` is given and
        ``sqrt(kc^2 - kappa^2/4)`` otherwise.
        """
        if kind not in KINDS:
            raise ValueError(f"unknown lattice kind {kind!r}")
        K1 = np.array([kappa, 0.0])
        if kind in ("square", "rectangle"):
            if ell is None:
                ell = (kc if kc is not None else kappa) + (ell_tilde or 0.0)
            K2 = np.array([0.0, ell])
        elif kind == "hexagonal":
            K2 = np.array([-kappa / 2, math.sqrt(3) * kappa / 2])
        elif kind == "quasihexagonal":
            if ell is None:
                if ell_tilde is not None:
                    ell = math.sqrt(3) * (kc + ell_tilde) / 2
                else:
                    ell = math.sqrt(kc * kc - kappa * kappa / 4)
            K2 = np.array([-kappa / 2, ell])
        else:
            if ell is None:
                raise ValueError("rhombic lattice needs ell")
            K2 = np.array([-kappa / 2, ell])
        return cls(kind, K1, K2, N_lat)


@dataclass(frozen=True)
class SpectrumResult:
    eigenvalues: np.ndarray
    critical_set: np.ndarray
    max_real_excluding_translation: float
    translation_eigenvalue_abs: float
    lattice: LatticeSpec | None = None
    eigenvectors: np.ndarray | None = field(default=None, repr=False)


def _symbols(sys: SystemSpec, mx: np.ndarray, my: np.ndarray, alpha_check: float, beta: float,
             c: float) -> np.ndarray:
    k2 = mx**2 + my**2
    base = sys.L + alpha_check * sys.M
    return (-k2[:, None, None] * sys.D + base
            + 1j * beta * mx[:, None, None] * advection_matrix(c))


def bloch_matrix(sys: SystemSpec, stripe: StripeSolution, gamma, ell, alpha_check: float, beta: float,
                 N: int, Jk: np.ndarray | None = None) -> np.ndarray:
    """Linearization on modes ``(n kappa + gamma, ell)``, ``|n| <= N``.

    ``gamma`` and ``ell`` broadcast; the result has shape
    ``(*shape, 2(2N+1), 2(2N+1))``.
    """
    gam, ell_ = np.broadcast_arrays(np.asarray(gamma, float), np.asarray(ell, float))
    n = np.arange(-N, N + 1)
    if Jk is None:
        Jk = nonlinear_jacobian_modes(sys, stripe, 2 * N)
    kmax = (Jk.shape[0] - 1) // 2
    diff = n[:, None] - n[None, :]
    coupling = Jk[np.clip(diff + kmax, 0, 2 * kmax)]                # (2N+1, 2N+1, 2, 2)
    coupling = np.where((np.abs(diff) <= kmax)[:, :, None, None], coupling, 0.0)
    mx = n * stripe.kappa + gam[..., None]                           # (*shape, 2N+1)
    my = np.broadcast_to(ell_[..., None], mx.shape)
    S = _symbols(sys, mx.ravel(), my.ravel(), alpha_check, beta, stripe.c_num)
    S = S.reshape(*mx.shape, 2, 2)
    blocks = np.broadcast_to(coupling, gam.shape + coupling.shape).astype(complex)
    idx = np.arange(2 * N + 1)
    blocks[..., idx, idx, :, :] += S
    P = 2 * (2 * N + 1)
    return np.swapaxes(blocks, -3, -2).reshape(*gam.shape, P, P)


def lattice_matrix(sys: SystemSpec, stripe: StripeSolution, lattice: LatticeSpec, alpha_check: float,
                   beta: float) -> np.ndarray:
    """Full dense linearization on modes ``n1 K1 + n2 K2``, ``|n1|, |n2| <= N_lat``.

    Requires ``K1`` to be the stripe wavevector; the stripe then couples only
    modes with equal ``n2``.
    """
    sys = _valid(sys)
    N = lattice.N_lat
    if not np.allclose(lattice.K1, [stripe.kappa, 0.0], rtol=0, atol=1e-14):
        raise ValueError("K1 must equal the stripe wavevector (kappa, 0)")
    Jk = nonlinear_jacobian_modes(sys, stripe, 2 * N)
    kmax = 2 * N
    n1, n2 = np.meshgrid(np.arange(-N, N + 1), np.arange(-N, N + 1), indexing="ij")
    n1, n2 = n1.ravel(), n2.ravel()
    m = n1[:, None] * lattice.K1 + n2[:, None] * lattice.K2
    S = _symbols(sys, m[:, 0], m[:, 1], alpha_check, beta, stripe.c_num)
    P = n1.size
    d1 = n1[:, None] - n1[None, :]
    same = n2[:, None] == n2[None, :]
    blocks = Jk[np.clip(d1 + kmax, 0, 2 * kmax)]
    blocks = np.where((same & (np.abs(d1) <= kmax))[:, :, None, None], blocks, 0.0)
    idx = np.arange(P)
    blocks[idx, idx] += S
    return blocks.transpose(0, 2, 1, 3).reshape(2 * P, 2 * P)


def _eig(A: np.ndarray, vectors: bool = False):
    try:
        if vectors:
            return scipy.linalg.eig(A, check_finite=True)
        return scipy.linalg.eigvals(A, check_finite=True), None
    except (np.linalg.LinAlgError, ValueError, scipy.linalg.LinAlgError) as exc:
        raise EigensolveFailure(str(exc)) from exc


def _summarize(ev: np.ndarray, ncrit: int, lattice=None, vecs=None) -> SpectrumResult:
    order = np.argsort(np.abs(ev))
    crit = ev[order[:ncrit]]
    trans = float(np.abs(ev[order[0]]))
    rest = ev[np.abs(ev) > TRANSLATION_EXCLUSION]
    mx = float(rest.real.max()) if rest.size else float("-inf")
    return SpectrumResult(ev, crit, mx, trans, lattice, vecs)


def _critical_count(kind: str) -> int:
    return 6 if kind in ("hexagonal", "quasihexagonal", "rhombic") else 4


def lattice_linearization(sys: SystemSpec, stripe: StripeSolution, lattice: LatticeSpec,
                          alpha_check: float, beta: float, ncrit: int | None = None,
                          vectors: bool = False) -> SpectrumResult:
    A = lattice_matrix(sys, stripe, lattice, alpha_check, beta)
    ev, vecs = _eig(A, vectors)
    return _summarize(ev, ncrit or _critical_count(lattice.kind), lattice, vecs)


def bloch_spectrum(sys: SystemSpec, stripe: StripeSolution, gamma, ell, alpha_check: float,
                   beta: float, N: int = 8, Jk: np.ndarray | None = None) -> np.ndarray:
    """Eigenvalues of the Bloch operator; ``gamma`` and ``ell`` broadcast.

    Returns shape ``(*shape, 2(2N+1))`` sorted by decreasing real part.
    ``Jk`` may pass precomputed :func:`nonlinear_jacobian_modes` output.
    """
    sys = _valid(sys)
    A = bloch_matrix(sys, stripe, gamma, ell, alpha_check, beta, N, Jk)
    if not np.all(np.isfinite(A)):
        raise EigensolveFailure("non-finite Bloch matrix")
    try:
        ev = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise EigensolveFailure(str(exc)) from exc
    order = np.argsort(-ev.real, axis=-1)
    return np.take_along_axis(ev, order, axis=-1)
