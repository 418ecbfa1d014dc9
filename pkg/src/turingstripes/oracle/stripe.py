"""Stripes as steady states in the comoving frame, computed by Newton iteration
on a one-dimensional Fourier-Galerkin truncation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.linalg import eig as scipy_eig

from ..errors import NewtonDiverged, TruncationInsufficient
from ..model import SystemSpec, _valid, advection_matrix

__all__ = ["StripeSolution", "landau_guess", "linear_growth", "nonlinear_jacobian_modes", "solve_stripe_1d",
           "stripe_guess"]

RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class StripeSolution:
    """Converged stripe.

    ``fourier_coeffs[n + N]`` is the complex 2-vector of mode ``n`` for
    ``n = -N..N``; the profile is ``sum_n a_n exp(i n kappa x)``.
    """

    kappa: float
    c_num: float
    fourier_coeffs: np.ndarray
    residual_norm: float
    N: int
    iterations: int = 0
    alpha_check: float = 0.0
    beta: float = 0.0
    contraction: float = 0.0

    def mode(self, n: int) -> np.ndarray:
        if abs(n) > self.N:
            return np.zeros(2, dtype=complex)
        return self.fourier_coeffs[n + self.N]

    @property
    def amplitude(self) -> float:
        """Norm of the first harmonic, comparable to the leading-order ``A``."""
        return float(np.linalg.norm(self.mode(1)))

    @property
    def is_trivial(self) -> bool:
        return self.amplitude < 1e-9


def _grid_size(N: int) -> int:
    # products of up to three factors: modes up to 3N must not alias into |n| <= N,
    # and the Jacobian needs the quadratic products up to |n| <= 2N exactly
    return 4 * N + 4


def _to_grid(half: np.ndarray, Mg: int) -> np.ndarray:
    """Half spectrum (n = 0..N, shape (N+1, 2)) to real samples, shape (2, Mg)."""
    spec = np.zeros((2, Mg // 2 + 1), dtype=complex)
    spec[:, : half.shape[0]] = half.T
    return np.fft.irfft(spec, n=Mg) * Mg


def _from_grid(f: np.ndarray, nmax: int) -> np.ndarray:
    """Real samples (..., Mg) to half spectrum n = 0..nmax, shape (..., nmax+1)."""
    Mg = f.shape[-1]
    return np.fft.rfft(f, axis=-1)[..., : nmax + 1] / Mg


def _nonlinear(sys: SystemSpec, u: np.ndarray) -> np.ndarray:
    quad = np.einsum("ijk,jx,kx->ix", sys.Q, u, u)
    cub = np.einsum("ijkl,jx,kx,lx->ix", sys.K, u, u, u)
    return quad + cub


def nonlinear_jacobian_modes(sys: SystemSpec, stripe: StripeSolution, kmax: int) -> np.ndarray:
    """Fourier modes ``k = -kmax..kmax`` of ``J(x) = 2Q[U,.] + 3K[U,U,.]``.

    Returns an array of shape ``(2 kmax + 1, 2, 2)``.
    """
    N = stripe.N
    Mg = max(_grid_size(N), 2 * kmax + 2)
    half = stripe.fourier_coeffs[N:]
    u = _to_grid(half, Mg)
    J = 2 * np.einsum("ijk,jx->ikx", sys.Q, u) + 3 * np.einsum("ijkl,jx,kx->ilx", sys.K, u, u)
    spec = np.fft.fft(J, axis=-1) / Mg
    ks = np.arange(-kmax, kmax + 1)
    return np.moveaxis(spec[:, :, ks % Mg], -1, 0)


class _Discretization:
    """Real unknown layout: Re a_0 (2), then Re/Im of a_n for n = 1..N (4 each), then c."""

    def __init__(self, sys: SystemSpec, alpha_check: float, beta: float, kappa: float, N: int):
        self.sys, self.N, self.kappa, self.beta = sys, N, kappa, beta
        self.Mg = _grid_size(N)
        n = np.arange(N + 1)
        self.n = n
        base = sys.L + alpha_check * sys.M
        self.S0 = -(kappa * n)[:, None, None] ** 2 * sys.D + base      # (N+1, 2, 2)
        self.adv = 1j * kappa * beta * n                                # times B(c)
        self.nreal = 4 * N + 2

    def unpack(self, x: np.ndarray):
        N = self.N
        half = np.zeros((N + 1, 2), dtype=complex)
        half[0] = x[:2]
        z = x[2:self.nreal].reshape(N, 2, 2)
        half[1:] = z[:, 0, :] + 1j * z[:, 1, :]
        return half, x[self.nreal]

    def pack(self, half: np.ndarray, c: float) -> np.ndarray:
        x = np.empty(self.nreal + 1)
        x[:2] = half[0].real
        x[2:self.nreal] = np.stack([half[1:].real, half[1:].imag], axis=1).ravel()
        x[self.nreal] = c
        return x

    def symbol(self, c: float) -> np.ndarray:
        return self.S0 + self.adv[:, None, None] * advection_matrix(c)

    def residual(self, x: np.ndarray) -> np.ndarray:
        half, c = self.unpack(x)
        u = _to_grid(half, self.Mg)
        nl = _from_grid(_nonlinear(self.sys, u), self.N).T          # (N+1, 2)
        R = np.einsum("nij,nj->ni", self.symbol(c), half) + nl
        out = np.empty(self.nreal + 1)
        out[:2] = R[0].real
        out[2:self.nreal] = np.stack([R[1:].real, R[1:].imag], axis=1).ravel()
        out[self.nreal] = half[1, 0].imag
        return out

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        N, Mg = self.N, self.Mg
        half, c = self.unpack(x)
        u = _to_grid(half, Mg)
        Jx = 2 * np.einsum("ijk,jx->ikx", self.sys.Q, u) + 3 * np.einsum("ijkl,jx,kx->ilx", self.sys.K, u, u)
        Jk = np.fft.fft(Jx, axis=-1) / Mg                            # J_k at index k mod Mg
        # complex derivative of R_n (n = 0..N) w.r.t. a_m (m = -N..N)
        ms = np.arange(-N, N + 1)
        C = np.zeros((N + 1, 2, 2 * N + 1, 2), dtype=complex)
        for i, nn in enumerate(range(N + 1)):
            C[i, :, :, :] = np.moveaxis(Jk[:, :, (nn - ms) % Mg], 1, 2)
        S = self.symbol(c)
        for nn in range(N + 1):
            C[nn, :, nn + N, :] += S[nn]
        # chain rule to the real unknowns, using a_{-m} = conj(a_m)
        P = np.zeros((2 * N + 1, 2, self.nreal), dtype=complex)
        for comp in range(2):
            P[N, comp, comp] = 1.0
        for m in range(1, N + 1):
            for comp in range(2):
                re = 2 + 4 * (m - 1) + comp
                im = re + 2
                P[N + m, comp, re] = 1.0
                P[N + m, comp, im] = 1j
                P[N - m, comp, re] = 1.0
                P[N - m, comp, im] = -1j
        Jc = C.reshape(2 * (N + 1), 2 * (2 * N + 1)) @ P.reshape(2 * (2 * N + 1), self.nreal)
        Jc = Jc.reshape(N + 1, 2, self.nreal)
        dc = (self.adv[:, None] * np.einsum("ij,nj->ni", advection_matrix(1.0) - advection_matrix(0.0), half))
        jac = np.zeros((self.nreal + 1, self.nreal + 1))
        jac[:2, : self.nreal] = Jc[0].real
        jac[:2, self.nreal] = dc[0].real
        body = np.stack([Jc[1:].real, Jc[1:].imag], axis=1).reshape(4 * N, self.nreal)
        jac[2:self.nreal, : self.nreal] = body
        jac[2:self.nreal, self.nreal] = np.stack([dc[1:].real, dc[1:].imag], axis=1).ravel()
        jac[self.nreal, 2 + 2] = 1.0       # Im a_1[0]
        return jac


def stripe_guess(sys: SystemSpec, N: int, alpha_check: float, beta: float, kappa: float,
                 turing=None, coeffs=None) -> tuple[np.ndarray, float]:
    """Half spectrum and velocity parameter from the leading-order expansion."""
    from ..coefficients import compute_coefficients, stripe_amplitude
    from ..model import linear_coeffs

    if turing is None:
        turing = linear_coeffs(sys)
    if coeffs is None:
        coeffs = compute_coefficients(sys, turing)
    alpha = turing.lambda_M * alpha_check
    kt = kappa - turing.kc
    half = np.zeros((N + 1, 2), dtype=complex)
    st = stripe_amplitude(coeffs, turing, alpha, beta, kt)
    if st is not None and st.A > 0:
        A = st.A
        e_vec = (turing.E0 + alpha_check * coeffs.w_Aalpha + 1j * beta * coeffs.w_Abeta
                 + kt * coeffs.w_Akappa + beta**2 * coeffs.w_Abetabeta)
        half[1] = A * e_vec
        half[0] = A**2 * coeffs.Q0
        if N >= 2:
            half[2] = A**2 * coeffs.Q2 / 2
    return half, turing.c


def linear_growth(sys: SystemSpec, kappa: float, beta: float = 0.0, alpha_check: float = 0.0):
    """Leading eigenvalue of the Fourier symbol at wavenumber ``kappa`` (lab frame,
    ``c = 0``) with right and left eigenvectors normalized so ``<e, e*> = 1``."""
    S = (-kappa**2 * sys.D + sys.L + alpha_check * sys.M
         + 1j * kappa * beta * advection_matrix(0.0))
    w, vl, vr = scipy_eig(S, left=True, right=True)
    i = int(np.argmax(w.real))
    e = vr[:, i] / np.linalg.norm(vr[:, i])
    es = vl[:, i].conj()
    es = es / (e @ es)
    return w[i], e, es


def landau_guess(sys: SystemSpec, N: int, alpha_check: float, beta: float, kappa: float,
                 min_amplitude: float = 1e-3) -> tuple[np.ndarray, float]:
    """Weakly nonlinear guess at an arbitrary wavenumber: the unstable Fourier
    eigenvector with amplitude from the local cubic (Landau) coefficient.

    Works for systems that are not at a Turing point, e.g. a scan over the
    Klausmeier rainfall parameter.
    """
    sys = _valid(sys)
    lam, e, es = linear_growth(sys, kappa, beta, alpha_check)
    c = -lam.imag / (kappa * beta) if beta != 0 else 0.0
    base = sys.L + alpha_check * sys.M
    S0 = base
    S2 = -4 * kappa**2 * sys.D + base + 2j * kappa * beta * advection_matrix(c)
    from ..model import bilinear, trilinear
    w0 = -np.linalg.solve(S0, 2 * bilinear(sys.Q, e, e.conj()))
    w2 = -np.linalg.solve(S2, bilinear(sys.Q, e, e))
    g = (2 * bilinear(sys.Q, e, w0) + 2 * bilinear(sys.Q, e.conj(), w2)
         + 3 * trilinear(sys.K, e, e, e.conj())) @ es
    if lam.real > 0 and g.real < 0:
        A = math.sqrt(-lam.real / g.real)
    else:
        A = min_amplitude
    half = np.zeros((N + 1, 2), dtype=complex)
    half[1] = A * e
    half[0] = A * A * w0
    if N >= 2:
        half[2] = A * A * w2
    return half, c


def _newton(disc: _Discretization, x: np.ndarray, max_iter: int, tol: float):
    free_c = disc.beta != 0.0
    r = disc.residual(x)
    res = float(np.linalg.norm(r))
    history = [res]
    it = 0
    while res > tol and it < max_iter:
        jac = disc.jacobian(x)
        if not free_c:
            jac = jac[:, :-1]
        dx = scipy.linalg.lstsq(jac, -r, lapack_driver="gelsy", check_finite=False)[0]
        if not free_c:
            dx = np.append(dx, 0.0)
        x = x + dx
        r = disc.residual(x)
        res = float(np.linalg.norm(r))
        history.append(res)
        it += 1
        if not np.isfinite(res):
            break
    return x, res, it, history


def solve_stripe_1d(sys: SystemSpec, alpha_check: float, beta: float, kappa: float, N: int = 32,
                    initial: tuple[np.ndarray, float] | StripeSolution | None = None,
                    max_iter: int = 30, tol: float = RESIDUAL_TOL,
                    check_truncation: bool = False) -> StripeSolution:
    """Newton iteration for the stripe with wavenumber ``kappa``.

    Parameters
    ----------
    initial
        Either ``(half_spectrum, c)`` or a previous :class:`StripeSolution`
        (continuation).  Defaults to the leading-order expansion.
    check_truncation
        Re-solve with ``2N`` modes and raise :class:`TruncationInsufficient` if
        the first harmonic moves by more than 1e-8.
    """
    sys = _valid(sys)
    if N < 1:
        raise ValueError("N must be positive")
    disc = _Discretization(sys, alpha_check, beta, kappa, N)
    if initial is None:
        half, c = stripe_guess(sys, N, alpha_check, beta, kappa)
    elif isinstance(initial, StripeSolution):
        half = np.zeros((N + 1, 2), dtype=complex)
        k = min(N, initial.N)
        half[: k + 1] = initial.fourier_coeffs[initial.N: initial.N + k + 1]
        c = initial.c_num
    else:
        half0, c = initial
        half = np.zeros((N + 1, 2), dtype=complex)
        k = min(N + 1, len(half0))
        half[:k] = half0[:k]
    # rotate into the phase gauge Im a_1[0] = 0 with Re a_1[0] <= 0 kept as given
    a10 = half[1, 0] if N >= 1 else 0
    if abs(a10) > 0:
        phase = np.exp(-1j * np.angle(a10)) * np.sign(a10.real or 1.0)
        half = half * phase ** np.arange(N + 1)[:, None]
    x0 = disc.pack(half, c)
    x, res, it, hist = _newton(disc, x0, max_iter, tol)
    if not res <= tol:
        raise NewtonDiverged(it, res)
    contraction = hist[-1] / hist[-2] if len(hist) > 1 and hist[-2] > 0 else 0.0
    half, c = disc.unpack(x)
    full = np.concatenate([np.conj(half[:0:-1]), half], axis=0)
    sol = StripeSolution(kappa=kappa, c_num=float(c) if beta != 0 else float(c), fourier_coeffs=full,
                         residual_norm=res, N=N, iterations=it, alpha_check=alpha_check, beta=beta,
                         contraction=contraction)
    if check_truncation:
        fine = solve_stripe_1d(sys, alpha_check, beta, kappa, 2 * N, initial=sol, max_iter=max_iter, tol=tol)
        if np.linalg.norm(fine.mode(1) - sol.mode(1)) > 1e-8:
            raise TruncationInsufficient(f"first harmonic moved by "
                                         f"{np.linalg.norm(fine.mode(1) - sol.mode(1)):.2e} when doubling N")
    return sol
