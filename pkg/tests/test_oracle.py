from __future__ import annotations

import numpy as np
import pytest

from turingstripes.coefficients import compute_coefficients, stripe_amplitude
from turingstripes.errors import ConfigError, NewtonDiverged
from turingstripes.model import designed_example, linear_coeffs
from turingstripes.oracle.asymptotics import SCENARIOS, compare_asymptotics, hypothesis_scaled
from turingstripes.oracle.lattice import LatticeSpec, bloch_spectrum, lattice_linearization
from turingstripes.oracle.stripe import solve_stripe_1d

EPS = 0.05
BASE = designed_example(1.0)


@pytest.fixture(scope="module")
def setup():
    sys = hypothesis_scaled(BASE, EPS)
    tur = linear_coeffs(sys)
    coef = compute_coefficients(sys, tur)
    alpha, beta, kt = EPS**2 * 3.0, EPS * 1.0, EPS * 0.2
    ac = alpha / tur.lambda_M
    stripe = solve_stripe_1d(sys, ac, beta, tur.kc + kt, 32)
    return sys, tur, coef, stripe, ac, beta, (alpha, beta, kt)


def test_stripe_solution_invariants(setup):
    sys, tur, coef, stripe, ac, beta, mu = setup
    assert stripe.residual_norm <= 1e-10
    a = stripe.fourier_coeffs
    N = stripe.N
    assert np.allclose(a[N - np.arange(N + 1)], np.conj(a[N + np.arange(N + 1)]), atol=0)
    assert stripe.mode(1)[0].imag == pytest.approx(0.0, abs=1e-14)
    assert stripe.contraction < 0.1


def test_stripe_matches_asymptotics(setup):
    sys, tur, coef, stripe, ac, beta, mu = setup
    A = stripe_amplitude(coef, tur, *mu).A
    # the first harmonic of the component along E0 carries the amplitude
    assert 2 * abs(stripe.mode(1) @ tur.E0_star) == pytest.approx(2 * A, rel=5 * EPS)
    assert stripe.c_num == pytest.approx(tur.c, abs=5 * EPS)


def test_newton_failure_is_reported():
    sys = hypothesis_scaled(BASE, EPS)
    with pytest.raises(NewtonDiverged):
        solve_stripe_1d(sys, 0.5, 0.0, 1.0, 16, max_iter=2)


@pytest.mark.parametrize("kind", ["square", "hexagonal", "quasihexagonal"])
def test_lattice_spectrum_invariants(setup, kind):
    sys, tur, coef, stripe, ac, beta, mu = setup
    lat = LatticeSpec.build(kind, stripe.kappa, 6, kc=tur.kc, ell_tilde=0.0 if kind != "hexagonal" else None)
    spec = lattice_linearization(sys, stripe, lat, ac, beta)
    assert spec.translation_eigenvalue_abs <= 1e-8
    ev = spec.eigenvalues
    dist = np.abs(ev[:, None] - np.conj(ev)[None, :]).min(axis=1)
    assert dist.max() <= 1e-10 * max(1.0, np.abs(ev).max())


def test_truncation_robustness(setup):
    sys, tur, coef, stripe, ac, beta, mu = setup
    crit = []
    for N, N_lat in ((16, 4), (32, 8)):
        st = solve_stripe_1d(sys, ac, beta, stripe.kappa, N)
        lat = LatticeSpec.build("hexagonal", st.kappa, N_lat)
        crit.append(np.sort_complex(lattice_linearization(sys, st, lat, ac, beta).critical_set))
    assert np.max(np.abs(crit[0] - crit[1])) <= 1e-8


def test_bloch_matches_lattice(setup):
    sys, tur, coef, stripe, ac, beta, mu = setup
    lat = LatticeSpec.build("hexagonal", stripe.kappa, 6)
    spec = lattice_linearization(sys, stripe, lat, ac, beta)
    # the hexagonal side modes sit in the Bloch sector gamma = kappa/2, ell = sqrt(3) kappa/2
    ev = bloch_spectrum(sys, stripe, stripe.kappa / 2, np.sqrt(3) * stripe.kappa / 2, ac, beta, N=24)
    lead = ev[:2]
    for v in lead:
        assert np.min(np.abs(spec.eigenvalues - v)) < 1e-8


def test_bloch_shapes(setup):
    sys, tur, coef, stripe, ac, beta, mu = setup
    ev = bloch_spectrum(sys, stripe, np.zeros(3), np.array([0.1, 0.2, 0.3]), ac, beta, N=8)
    assert ev.shape == (3, 2 * 17)
    assert np.all(np.diff(ev.real, axis=-1) <= 1e-14)


def test_square_scenario_converges():
    rep = compare_asymptotics(BASE, "square", (0.05, 0.025), N=16, N_lat=4)
    assert rep.translation_ok
    assert rep.min_order >= 2.5


def test_scenario_table():
    assert set(SCENARIOS) >= {"square", "hex", "quasihex"}
    with pytest.raises(ConfigError):
        compare_asymptotics(BASE, "nope")
    with pytest.raises(ConfigError):
        compare_asymptotics(BASE, "square", (0.01, 0.02))
