"""Brute-force stripe stability scans for the extended Klausmeier model."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import label
from scipy.optimize import brentq, minimize_scalar, root

from ..boundaries import DiagramGrid
from ..errors import ConfigError, EigensolveFailure, NewtonDiverged, NoTuringWavenumber
from ..model import klausmeier
from .lattice import bloch_spectrum
from .stripe import StripeSolution, landau_guess, linear_growth, nonlinear_jacobian_modes, solve_stripe_1d

__all__ = ["CellStatus", "CrossingResult", "EllSweep", "KlausmeierScan", "klausmeier_onset",
           "klausmeier_scan", "klausmeier_turing_point", "region_components", "rhombic_criticality_crossing",
           "rhombic_growth_maxima"]

log = logging.getLogger(__name__)

GROWTH_TOL = 1e-9          # breakup: max Re lambda above this
NEUTRAL_TOL = 1e-11        # sign of the near-neutral branch (zigzag, Eckhaus)
ECKHAUS_FRACTION = 0.01    # Floquet exponent gamma = fraction * kappa
SUBSTEPS = (2, 4, 8)
MAX_STEP = 0.005           # continuation step in a
START_OFFSET = 2e-3       # first solve this far below onset
LANDAU_RANGE = 0.02        # weakly nonlinear guess usable this close to onset
ONSET_SAMPLES = 60        # bracketing samples for the onset root


class CellStatus:
    OK = 0
    ABOVE_ONSET = 1
    NEWTON_FAILED = 2
    TRIVIAL = 3
    EIG_FAILED = 4


@dataclass(frozen=True)
class EllSweep:
    """Log-spaced transverse wavenumbers ``ell in [lo kc, hi kc]``."""

    per_decade: int = 64
    lo: float = 0.01
    hi: float = 1.5

    def values(self, kc: float) -> np.ndarray:
        n = int(math.ceil(self.per_decade * math.log10(self.hi / self.lo))) + 1
        return np.geomspace(self.lo * kc, self.hi * kc, n)


def klausmeier_onset(kappa: float, beta: float = 0.0, m: float = 0.45, d: float = 500.0,
                     a_lo: float | None = None, a_hi: float = 6.0) -> float:
    """Largest rainfall ``a`` at which wavenumber ``kappa`` is neutrally stable.

    Stripes exist for ``a`` slightly below this value.  Returns NaN when the
    mode is stable throughout ``[a_lo, a_hi]``.
    """
    a_lo = 2 * m + 1e-6 if a_lo is None else a_lo

    def f(a):
        return linear_growth(klausmeier(a, m, d), kappa, beta)[0].real

    grid = np.linspace(a_hi, a_lo, ONSET_SAMPLES)
    prev_a, prev_f = grid[0], f(grid[0])
    if prev_f > 0:
        raise ConfigError(f"mode kappa={kappa} is unstable at a={a_hi}; raise a_hi")
    for a in grid[1:]:
        fa = f(a)
        if fa > 0:
            return brentq(f, a, prev_a, xtol=1e-13)
        prev_a, prev_f = a, fa
    return float("nan")


def klausmeier_turing_point(beta: float = 0.0, m: float = 0.45, d: float = 500.0,
                            bracket=(0.2, 0.8)) -> tuple[float, float]:
    """``(kc, a_T)``: the wavenumber that destabilizes first as ``a`` decreases."""
    res = minimize_scalar(lambda k: -klausmeier_onset(k, beta, m, d), bounds=bracket, method="bounded",
                          options={"xatol": 1e-9})
    a_T = -res.fun
    if not np.isfinite(a_T):
        raise NoTuringWavenumber("no Turing onset in the wavenumber bracket")
    return float(res.x), float(a_T)


@dataclass
class KlausmeierScan:
    """Per-cell results on the ``(kappa, a)`` grid; arrays are indexed ``[ia, ik]``."""

    kappa: np.ndarray
    a: np.ndarray
    beta: float
    m: float
    d: float
    N: int
    N_lat: int
    kc: float
    onset: np.ndarray                      # per kappa
    status: np.ndarray
    fields: dict                           # name -> float array
    stripes: np.ndarray = field(repr=False)   # [ia, ik, n, comp] half spectra, NaN when absent
    c_num: np.ndarray = field(repr=False)
    records: list = field(default_factory=list, repr=False)

    @property
    def exists(self) -> np.ndarray:
        return self.status == CellStatus.OK

    def flags(self) -> dict:
        ex = self.exists
        f = self.fields
        with np.errstate(invalid="ignore"):
            zigzag = ex & (f["zigzag"] > NEUTRAL_TOL)
            eckhaus = ex & (f["eckhaus"] > NEUTRAL_TOL)
            rect = ex & ((f["rect_max"] > GROWTH_TOL) | zigzag)
            rhomb = ex & (f["rhomb_max"] > GROWTH_TOL)
            out = {
                "exists": ex,
                "zigzag": zigzag,
                "eckhaus": eckhaus,
                "square": ex & (f["quasi_square"] > GROWTH_TOL),
                "hex": ex & (f["hexagonal"] > GROWTH_TOL),
                "quasihex": ex & (f["quasi_hexagonal"] > GROWTH_TOL),
                "rectangle": rect,
                "rectangle_finite": ex & (f["rect_finite"] > GROWTH_TOL),
                "rhomb": rhomb,
            }
        out["stable"] = ex & ~(eckhaus | rect | rhomb)
        return out

    def stripe(self, ia: int, ik: int) -> StripeSolution | None:
        half = self.stripes[ia, ik]
        if not np.all(np.isfinite(half)):
            return None
        full = np.concatenate([np.conj(half[:0:-1]), half], axis=0)
        return StripeSolution(kappa=float(self.kappa[ik]), c_num=float(self.c_num[ia, ik]), fourier_coeffs=full,
                              residual_norm=float(self.fields["residual"][ia, ik]), N=self.N, iterations=0,
                              alpha_check=0.0, beta=self.beta)

    def to_diagram_grid(self) -> DiagramGrid:
        return DiagramGrid("kappa_a", self.kappa.copy(), self.a.copy(), self.flags(),
                           {"onset": (self.kappa.copy(), self.onset.copy())}, "kappa", "a",
                           {"model": "klausmeier", "beta": self.beta, "m": self.m, "d": self.d,
                            "N": self.N, "N_lat": self.N_lat})

    def write_log(self, path) -> None:
        with open(path, "w", newline="\n") as fh:
            for rec in self.records:
                fh.write(json.dumps(rec) + "\n")


FIELD_NAMES = ("amplitude", "residual", "eckhaus", "zigzag", "rect_max", "rect_finite", "rect_ell", "rhomb_max", "rhomb_ell",
               "quasi_square", "hexagonal", "quasi_hexagonal", "g1", "g2", "ell1", "ell2")


def _local_maxima(ells: np.ndarray, r: np.ndarray) -> list[tuple[float, float]]:
    """Interior local maxima of ``r(ell)`` refined by a parabola in ``log ell``."""
    out = []
    x = np.log(ells)
    for i in range(1, len(r) - 1):
        if r[i] >= r[i - 1] and r[i] > r[i + 1]:
            h0, h1 = x[i] - x[i - 1], x[i + 1] - x[i]
            # vertex of the parabola through three points
            d0, d1 = (r[i] - r[i - 1]) / h0, (r[i + 1] - r[i]) / h1
            curv = (d1 - d0) / (0.5 * (h0 + h1))
            if curv < 0:
                xm = 0.5 * (x[i - 1] + x[i]) - d0 / curv
                xm = min(max(xm, x[i - 1]), x[i + 1])
                val = _lagrange(x[i - 1: i + 2], r[i - 1: i + 2], xm)
                out.append((float(np.exp(xm)), float(val)))
            else:
                out.append((float(ells[i]), float(r[i])))
    return out


def _lagrange(xs, ys, x):
    total = 0.0
    for j in range(3):
        w = 1.0
        for k in range(3):
            if k != j:
                w *= (x - xs[k]) / (xs[j] - xs[k])
        total += ys[j] * w
    return total


def _top_two(maxima):
    """Two largest local maxima ordered by ``ell``; NaN-padded."""
    best = sorted(maxima, key=lambda t: -t[1])[:2]
    best.sort(key=lambda t: t[0])
    while len(best) < 2:
        best.append((float("nan"), float("nan")))
    return best


def _cell_spectra(sys, sol: StripeSolution, beta: float, kc: float, ells: np.ndarray, N_lat: int) -> dict:
    kappa = sol.kappa
    Jk = nonlinear_jacobian_modes(sys, sol, 2 * N_lat)
    ell_sq = kc
    ell_hex = math.sqrt(3) * kappa / 2
    ell_qh = math.sqrt(max(kc * kc - kappa * kappa / 4, 0.0))
    delta = ECKHAUS_FRACTION * kappa
    n = len(ells)
    gam = np.concatenate([np.zeros(n + 1), np.full(n + 2, kappa / 2), [delta]])
    ell = np.concatenate([ells, [ell_sq], ells, [ell_hex, ell_qh], [0.0]])
    ev = bloch_spectrum(sys, sol, gam, ell, 0.0, beta, N_lat, Jk=Jk)
    top = ev[:, 0].real
    rect, rhomb = top[:n], top[n + 1: 2 * n + 1]
    near0 = lambda e: e[np.argmin(np.abs(e))].real   # noqa: E731
    g = _top_two(_local_maxima(ells, rhomb))
    # growth not attached to the long-wave (zigzag) branch at the smallest ell
    cut = int(np.argmax(rect <= GROWTH_TOL)) if np.any(rect <= GROWTH_TOL) else n
    finite = float(rect[cut:].max()) if cut < n else float("-inf")
    return {
        "rect_finite": finite,
        "zigzag": near0(ev[0]),
        "eckhaus": near0(ev[-1]),
        "rect_max": float(rect.max()),
        "rect_ell": float(ells[int(np.argmax(rect))]),
        "rhomb_max": float(rhomb.max()),
        "rhomb_ell": float(ells[int(np.argmax(rhomb))]),
        "quasi_square": float(top[n]),
        "hexagonal": float(top[2 * n + 1]),
        "quasi_hexagonal": float(top[2 * n + 2]),
        "g1": g[0][1], "ell1": g[0][0], "g2": g[1][1], "ell2": g[1][0],
    }


def _path(a_from, a_to, a_on, refine):
    """Continuation points from ``a_from`` to ``a_to`` (exclusive, inclusive).

    Steps are capped by ``MAX_STEP`` and by half the distance to onset, since
    near the pitchfork the amplitude scales like its square root.
    """
    pts, a = [], a_from
    while a > a_to:
        h = MAX_STEP if a_on is None else min(MAX_STEP, 0.5 * max(a_on - a, 0.0) + 1e-12)
        a = max(a_to, a - h / refine)
        pts.append(a)
    return pts


def _fresh(a, kappa, beta, m, d, N):
    sys = klausmeier(a, m, d)
    return solve_stripe_1d(sys, 0.0, beta, kappa, N, initial=landau_guess(sys, N, 0.0, beta, kappa))


def _continue(a_from, sol_from, a_to, kappa, beta, m, d, N, a_on=None):
    """Solve at ``a_to`` from a solution at ``a_from``, subdividing on failure.

    Without a previous solution the branch is started from the weakly
    nonlinear guess just below ``a_on``.  A collapse onto the trivial state is
    retried from the weakly nonlinear guess at ``a_to``.
    """
    if sol_from is None:
        if a_on is None or a_on - START_OFFSET <= a_to:
            return _fresh(a_to, kappa, beta, m, d, N)
        a_from = a_on - START_OFFSET
        sol_from = _fresh(a_from, kappa, beta, m, d, N)
    last_exc = None
    for refine in (1,) + SUBSTEPS:
        try:
            sol = sol_from
            for a in _path(a_from, a_to, a_on, refine):
                sol = solve_stripe_1d(klausmeier(a, m, d), 0.0, beta, kappa, N, initial=sol)
            if not sol.is_trivial:
                return sol
        except NewtonDiverged as exc:
            last_exc = exc
    if a_on is not None and a_on - a_to < LANDAU_RANGE:
        return _fresh(a_to, kappa, beta, m, d, N)
    if last_exc is not None:
        raise last_exc
    return sol


def _scan_column(ik, kappa, a_grid, beta, m, d, N, N_lat, kc, ells):
    na = len(a_grid)
    out = {name: np.full(na, np.nan) for name in FIELD_NAMES}
    status = np.full(na, CellStatus.ABOVE_ONSET, dtype=int)
    stripes = np.full((na, N + 1, 2), np.nan + 0j, dtype=complex)
    cnum = np.full(na, np.nan)
    records = []
    a_on = klausmeier_onset(kappa, beta, m, d, a_lo=float(a_grid.min()) - 1e-3,
                            a_hi=max(6.0, float(a_grid.max()) + 0.5))
    order = np.argsort(-a_grid)
    prev_a, prev_sol = None, None
    for ia in order:
        a = float(a_grid[ia])
        if not (a < a_on):
            continue
        rec = {"cell": [int(ia), int(ik)], "kappa": float(kappa), "a": a, "N": N}
        try:
            sol = _continue(prev_a, prev_sol, a, kappa, beta, m, d, N, a_on)
        except NewtonDiverged as exc:
            status[ia] = CellStatus.NEWTON_FAILED
            rec.update(status="newton_failed", residual=float(exc.residual))
            records.append(rec)
            continue
        if sol.is_trivial:
            status[ia] = CellStatus.TRIVIAL
            rec.update(status="trivial", residual=float(sol.residual_norm))
            records.append(rec)
            continue
        prev_a, prev_sol = a, sol
        try:
            spec = _cell_spectra(klausmeier(a, m, d), sol, beta, kc, ells, N_lat)
        except EigensolveFailure as exc:
            status[ia] = CellStatus.EIG_FAILED
            rec.update(status="eig_failed", message=str(exc))
            records.append(rec)
            continue
        status[ia] = CellStatus.OK
        for name, val in spec.items():
            out[name][ia] = val
        out["amplitude"][ia] = sol.amplitude
        out["residual"][ia] = sol.residual_norm
        stripes[ia] = sol.fourier_coeffs[N:]
        cnum[ia] = sol.c_num
        rec.update(status="ok", residual=float(sol.residual_norm),
                   max_re=float(max(spec["rect_max"], spec["rhomb_max"], spec["eckhaus"])))
        records.append(rec)
    return ik, a_on, status, out, stripes, cnum, records


def _axis(spec) -> np.ndarray:
    if isinstance(spec, np.ndarray) or isinstance(spec, list):
        return np.asarray(spec, dtype=float)
    lo, hi, step = spec
    n = int(round((hi - lo) / step)) + 1
    if n < 1:
        raise ConfigError(f"empty axis {spec!r}")
    return lo + step * np.arange(n)


def klausmeier_scan(kappa_axis, a_axis, beta: float = 0.0, m: float = 0.45, d: float = 500.0, N: int = 64,
                    N_lat: int = 6, ell_sweep: EllSweep = EllSweep(), workers: int = 1,
                    progress=None) -> KlausmeierScan:
    """Classify stripes on a ``(kappa, a)`` grid.

    Parameters
    ----------
    kappa_axis, a_axis
        Either explicit arrays or ``(lo, hi, step)``.
    workers
        Columns (fixed ``kappa``) are independent; ``workers > 1`` runs them in
        a process pool.  Results are keyed by column index.

    Each column is continued downward in ``a`` from the onset of its
    wavenumber.  Failures are recorded per cell and never abort the scan.
    """
    kap = _axis(kappa_axis)
    a_grid = _axis(a_axis)
    if np.any(a_grid <= 2 * m):
        raise ConfigError(f"a must exceed 2m = {2 * m} for the vegetated state")
    if np.any(kap <= 0):
        raise ConfigError("kappa must be positive")
    kc, _ = klausmeier_turing_point(beta, m, d)
    ells = ell_sweep.values(kc)
    na, nk = len(a_grid), len(kap)
    status = np.full((na, nk), CellStatus.ABOVE_ONSET, dtype=int)
    fields = {name: np.full((na, nk), np.nan) for name in FIELD_NAMES}
    stripes = np.full((na, nk, N + 1, 2), np.nan + 0j, dtype=complex)
    cnum = np.full((na, nk), np.nan)
    onset = np.full(nk, np.nan)
    records = []
    args = [(ik, float(k), a_grid, beta, m, d, N, N_lat, kc, ells) for ik, k in enumerate(kap)]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_scan_column_star, args))
    else:
        results = []
        for arg in args:
            results.append(_scan_column(*arg))
            if progress is not None:
                progress(arg[0] + 1, nk)
    for ik, a_on, st, out, sp, cn, recs in sorted(results, key=lambda r: r[0]):
        onset[ik] = a_on
        status[:, ik] = st
        for name in FIELD_NAMES:
            fields[name][:, ik] = out[name]
        stripes[:, ik] = sp
        cnum[:, ik] = cn
        records.extend(recs)
    for rec in records:
        log.debug("cell %s status=%s residual=%s", rec["cell"], rec["status"], rec.get("residual"))
    return KlausmeierScan(kap, a_grid, beta, m, d, N, N_lat, kc, onset, status, fields, stripes, cnum, records)


def _scan_column_star(args):
    return _scan_column(*args)


# -- rhombic criticality curves ---------------------------------------------------

def rhombic_growth_maxima(kappa: float, a: float, beta: float = 0.0, m: float = 0.45, d: float = 500.0,
                          N: int = 64, N_lat: int = 6, initial: StripeSolution | None = None,
                          kc: float | None = None, ell_sweep: EllSweep = EllSweep(), xatol: float = 1e-9):
    """The two largest local maxima in ``ell`` of the rhombic growth rate.

    Returns ``((ell1, g1), (ell2, g2), stripe)`` with ``ell1 < ell2``; each
    maximum is polished by a bounded scalar search.
    """
    sys = klausmeier(a, m, d)
    sol = solve_stripe_1d(sys, 0.0, beta, kappa, N, initial=initial)
    if kc is None:
        kc, _ = klausmeier_turing_point(beta, m, d)
    ells = ell_sweep.values(kc)
    Jk = nonlinear_jacobian_modes(sys, sol, 2 * N_lat)

    def growth(ell):
        return bloch_spectrum(sys, sol, kappa / 2, ell, 0.0, beta, N_lat, Jk=Jk)[..., 0].real

    r = growth(ells)
    maxima = []
    step = ells[1] / ells[0]
    for ell0, _ in _local_maxima(ells, r):
        res = minimize_scalar(lambda x: -float(growth(x)), bounds=(ell0 / step, ell0 * step), method="bounded",
                              options={"xatol": xatol})
        maxima.append((float(res.x), -float(res.fun)))
    (l1, g1), (l2, g2) = _top_two(maxima)
    return (l1, g1), (l2, g2), sol


@dataclass(frozen=True)
class CrossingResult:
    kappa: float
    a: float
    g1: float
    g2: float
    ell1: float
    ell2: float
    grid_estimate: tuple[float, float]
    refined: bool


def _bilinear_zero(G1, G2):
    """Common zero of the bilinear interpolants on the unit square, or None."""
    def interp(G, s, t):
        return (G[0, 0] * (1 - s) * (1 - t) + G[0, 1] * s * (1 - t) + G[1, 0] * (1 - s) * t + G[1, 1] * s * t)

    x = np.array([0.5, 0.5])
    for _ in range(50):
        s, t = x
        F = np.array([interp(G1, s, t), interp(G2, s, t)])
        J = np.array([[(G[0, 1] - G[0, 0]) * (1 - t) + (G[1, 1] - G[1, 0]) * t,
                       (G[1, 0] - G[0, 0]) * (1 - s) + (G[1, 1] - G[0, 1]) * s] for G in (G1, G2)])
        try:
            dx = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            return None
        x = x + dx
        if np.linalg.norm(dx) < 1e-12:
            break
    if np.all(x >= -1e-9) and np.all(x <= 1 + 1e-9) and np.all(np.isfinite(x)):
        return x
    return None


def rhombic_criticality_crossing(scan: KlausmeierScan, refine: bool = True,
                                 target: tuple[float, float] | None = None) -> CrossingResult:
    """Intersection of the zero sets of the two rhombic growth maxima.

    Candidates come from bilinear interpolation on grid quads; with several,
    the one nearest ``target`` (or the grid centre) is kept.  ``refine``
    polishes it by a two-dimensional root solve on fresh stripe computations.
    """
    G1, G2 = scan.fields["g1"], scan.fields["g2"]
    L1, L2 = scan.fields["ell1"], scan.fields["ell2"]
    cands = []
    na, nk = G1.shape
    for ia in range(na - 1):
        for ik in range(nk - 1):
            q1, q2 = G1[ia:ia + 2, ik:ik + 2], G2[ia:ia + 2, ik:ik + 2]
            if not (np.all(np.isfinite(q1)) and np.all(np.isfinite(q2))):
                continue
            if q1.min() > 0 or q1.max() < 0 or q2.min() > 0 or q2.max() < 0:
                continue
            # both maxima must be the same branches across the quad
            if np.ptp(L1[ia:ia + 2, ik:ik + 2]) > 0.25 * np.nanmean(L1[ia:ia + 2, ik:ik + 2]):
                continue
            st = _bilinear_zero(q1, q2)
            if st is None:
                continue
            s, t = st
            kap = scan.kappa[ik] + s * (scan.kappa[ik + 1] - scan.kappa[ik])
            a = scan.a[ia] + t * (scan.a[ia + 1] - scan.a[ia])
            cands.append((kap, a, ia, ik))
    if not cands:
        raise ConfigError("the two rhombic criticality curves do not cross inside the scanned grid")
    ref = target if target is not None else (scan.kappa.mean(), scan.a.mean())
    kap, a, ia, ik = min(cands, key=lambda c: ((c[0] - ref[0]) / np.ptp(scan.kappa)) ** 2
                         + ((c[1] - ref[1]) / max(np.ptp(scan.a), 1e-300)) ** 2)
    est = (float(kap), float(a))
    if not refine:
        return CrossingResult(kap, a, 0.0, 0.0, float(L1[ia, ik]), float(L2[ia, ik]), est, False)
    ja = ia if abs(scan.a[ia] - a) <= abs(scan.a[ia + 1] - a) else ia + 1
    jk = ik if abs(scan.kappa[ik] - kap) <= abs(scan.kappa[ik + 1] - kap) else ik + 1
    seed = scan.stripe(ja, jk)
    scale = np.array([abs(np.nanmax(np.abs(G1))) or 1.0, abs(np.nanmax(np.abs(G2))) or 1.0])
    cache = {}

    def F(x):
        (l1, g1), (l2, g2), sol = rhombic_growth_maxima(float(x[0]), float(x[1]), scan.beta, scan.m, scan.d,
                                                        scan.N, scan.N_lat, initial=seed, kc=scan.kc)
        cache["last"] = (l1, g1, l2, g2)
        return np.array([g1, g2]) / scale

    sol = root(F, np.array([kap, a]), method="hybr", options={"eps": 1e-10, "xtol": 1e-10})
    F(sol.x)
    l1, g1, l2, g2 = cache["last"]
    if not sol.success or not np.all(np.isfinite([g1, g2])):
        return CrossingResult(kap, a, float("nan"), float("nan"), float(L1[ia, ik]), float(L2[ia, ik]), est, False)
    return CrossingResult(float(sol.x[0]), float(sol.x[1]), g1, g2, l1, l2, est, True)


def region_components(mask: np.ndarray, connectivity: int = 4, min_size: int = 1) -> int:
    """Number of connected components of a boolean grid region.

    ``connectivity=4`` pairs with an 8-connected complement, so a stable
    channel one cell wide along a diagonal separates two regions.  Components
    with fewer than ``min_size`` cells are ignored.
    """
    structure = np.ones((3, 3), int) if connectivity == 8 else None
    lab, n = label(np.asarray(mask, bool), structure=structure)
    sizes = np.bincount(lab.ravel(), minlength=n + 1)[1:]
    return int(np.sum(sizes >= min_size))
