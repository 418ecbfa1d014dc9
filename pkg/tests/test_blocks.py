from __future__ import annotations

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from turingstripes.blocks import (OmegaParam, block_L1, block_L2_hex, block_L2_quasihex, block_L2_square,
                                  omega_quasihex)
from turingstripes.coefficients import compute_coefficients, stripe_amplitude
from turingstripes.errors import InconsistentAmplitude, ThetaOutOfRange
from turingstripes.model import designed_example, linear_coeffs

SYS = designed_example(0.4)
TUR = linear_coeffs(SYS)
COEF = compute_coefficients(SYS, TUR)

mu = st.tuples(st.floats(0.05, 2.0), st.floats(-1.5, 1.5), st.floats(-0.3, 0.3))


def _on_branch(mu_p):
    st_ = stripe_amplitude(COEF, TUR, *mu_p)
    assume(st_ is not None and st_.A > 1e-3)
    return st_.A


@given(st.floats(0, 3))
def test_l1_eigenvalues(A):
    blk = block_L1(COEF, A)
    assert sorted(np.linalg.eigvals(blk.entries).real) == pytest.approx(sorted(blk.eigenvalues), abs=1e-12)
    assert set(np.round(blk.eigenvalues, 12)) == set(np.round((0.0, 2 * COEF.rho_nl * A * A), 12))


@given(mu, st.floats(-1, 1))
def test_square_two_paths(mu_p, ell_p):
    A = _on_branch(mu_p)
    blk = block_L2_square(COEF, TUR, A, mu_p, ell_p)
    assert blk.entries[0, 1] == 0 and blk.entries[0, 0] == blk.entries[1, 1]
    assert blk.eigenvalues[0] == pytest.approx(blk.alt_eigenvalues[0], abs=1e-10)


@given(mu)
def test_hex_two_paths(mu_p):
    A = _on_branch(mu_p)
    blk = block_L2_hex(SYS, COEF, TUR, A, mu_p)
    alpha, beta, _ = mu_p
    a_direct = alpha + 0.25 * TUR.rho_beta * beta**2 + TUR.rho_kappa * mu_p[2] ** 2 + A * A * COEF.eta
    a_closed = A * A * (3 * COEF.k0 - COEF.q2 + 8 * COEF.q1) - 0.75 * TUR.rho_beta * beta**2
    assert a_direct == pytest.approx(a_closed, abs=1e-10)
    ev = np.linalg.eigvals(blk.entries)
    assert np.max(np.abs(ev.imag)) < 1e-12
    assert sorted(ev.real) == pytest.approx(list(blk.eigenvalues), abs=1e-12)


@given(mu)
def test_hex_even_in_beta(mu_p):
    A = _on_branch(mu_p)
    flipped = (mu_p[0], -mu_p[1], mu_p[2])
    e1 = block_L2_hex(SYS, COEF, TUR, A, mu_p).eigenvalues
    e2 = block_L2_hex(SYS, COEF, TUR, A, flipped).eigenvalues
    assert e1 == pytest.approx(e2, abs=1e-12)


@given(mu)
def test_quasihex_reduces_to_hex(mu_p):
    A = _on_branch(mu_p)
    qh = block_L2_quasihex(SYS, COEF, TUR, A, mu_p, mu_p[2])
    hx = block_L2_hex(SYS, COEF, TUR, A, mu_p)
    assert np.allclose(qh.entries, hx.entries, atol=1e-12)
    assert qh.eigenvalues == pytest.approx(hx.eigenvalues, abs=1e-12)


@given(mu, st.floats(-1, 1))
def test_quasihex_two_paths(mu_p, ell_p):
    A = _on_branch(mu_p)
    blk = block_L2_quasihex(SYS, COEF, TUR, A, mu_p, ell_p)
    assert blk.eigenvalues == pytest.approx(blk.alt_eigenvalues, abs=1e-10)


def test_amplitude_consistency_enforced():
    with pytest.raises(InconsistentAmplitude):
        block_L2_hex(SYS, COEF, TUR, 5.0, (1.0, 0.5, 0.2))
    with pytest.warns(UserWarning):
        blk = block_L2_hex(SYS, COEF, TUR, 5.0, (1.0, 0.5, 0.2), strict=False)
    assert not blk.amplitude_consistent


@given(st.floats(0.01, 1.0), st.floats(-0.5, 0.5).filter(lambda k: abs(k) > 1e-3))
def test_omega_parametrization(theta, kt):
    om = OmegaParam(theta, kt, TUR.rho_kappa)
    assert 0 < om.omega <= -TUR.rho_kappa * kt * kt + 1e-15
    assert omega_quasihex(TUR, kt, om.ell_tilde) == pytest.approx(om.omega, rel=1e-10, abs=1e-15)


def test_omega_most_unstable_detuning():
    kt = 0.3
    assert OmegaParam(1.0, kt, TUR.rho_kappa).ell_tilde == pytest.approx(-kt / 3)
    ells = np.linspace(-1, 1, 20001)
    w = omega_quasihex(TUR, kt, ells)
    assert ells[np.argmax(w)] == pytest.approx(-kt / 3, abs=1e-4)
    assert w.max() == pytest.approx(-TUR.rho_kappa * kt * kt, rel=1e-6)
    assert omega_quasihex(TUR, kt, kt) == 0


@pytest.mark.parametrize("theta", [0.0, -0.1, 1.5])
def test_theta_range(theta):
    with pytest.raises(ThetaOutOfRange):
        OmegaParam(theta, 0.1, TUR.rho_kappa)
