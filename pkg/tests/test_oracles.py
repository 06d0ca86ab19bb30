"""Closed-form solutions: pointwise PDE residuals, boundary data, frozen values."""
import numpy as np
import pytest

from covaug.oracles import (ConvDiffExact, EllipticExact, exact_convdiff, exact_elliptic,
                            fit_elliptic_constants)
from covaug.solvers import solve_convdiff_1d


# frozen: e^{1/4 - 1/400} e^{-pi^2/100}
SINGLE_MODE_VALUE = 1.1604454685237076
# frozen: a0 = 1 fit, c1 = c2 = -1 / (1 - e^{-1})
A0_CONSTANT = -1.5819767068693265


def test_convdiff_single_mode_value():
    o = ConvDiffExact([1.0])
    assert exact_convdiff(o, 0.5, 0.01) == pytest.approx(SINGLE_MODE_VALUE, abs=1e-14)
    assert SINGLE_MODE_VALUE == pytest.approx(np.exp(0.25 - 0.0025 - np.pi**2 * 0.01), rel=1e-15)


def test_convdiff_boundary_and_initial():
    rng = np.random.default_rng(1)
    o = ConvDiffExact(rng.standard_normal(4))
    t = rng.uniform(0, 1, 10)
    assert np.abs(o(0.0, t)).max() < 1e-14
    assert np.abs(o(1.0, t)).max() < 1e-12
    x = np.linspace(0, 1, 33)
    k = np.arange(1, 5)
    alpha = np.exp(x / 2) * (np.sin(np.pi * np.outer(x, k)) @ o.coeffs)
    np.testing.assert_allclose(o.initial(x), alpha, atol=1e-14)


def test_convdiff_pde_residual():
    rng = np.random.default_rng(2)
    o = ConvDiffExact(rng.standard_normal(3))
    x, t = rng.uniform(0, 1, 200), rng.uniform(0, 0.5, 200)
    _, phi_t, phi_x, phi_xx = o.derivatives(x, t)
    assert np.abs(phi_t + phi_x - phi_xx).max() <= 1e-9


def test_convdiff_derivatives_match_finite_differences():
    o = ConvDiffExact([0.3, -1.2, 0.5])
    x, t, d = 0.37, 0.02, 1e-6
    phi, phi_t, phi_x, _ = o.derivatives(x, t)
    assert phi_x == pytest.approx((o(x + d, t) - o(x - d, t)) / (2 * d), rel=1e-6)
    assert phi_t == pytest.approx((o(x, t + d) - o(x, t - d)) / (2 * d), rel=1e-6)


def test_convdiff_matches_fine_crank_nicolson():
    o = ConvDiffExact([1.0])
    sol = solve_convdiff_1d(1.0, 1.0, o.initial, 2001, 4001, 0.01)
    x = np.linspace(0, 1, 2001)
    assert abs(sol.final[1000] - SINGLE_MODE_VALUE) < 1e-4
    assert np.abs(sol.final - o(x, 0.01)).max() < 1e-4


def test_elliptic_zero_coefficients():
    assert fit_elliptic_constants([0.0], []) == (0.0, 0.0)
    o = EllipticExact(np.zeros(4), np.zeros(3))
    assert np.all(o(np.linspace(0, 1, 11)) == 0.0)


def test_elliptic_constant_rhs_constants():
    c1, c2 = fit_elliptic_constants([1.0, 0, 0, 0], [0, 0, 0])
    assert c1 == pytest.approx(A0_CONSTANT, rel=1e-14)
    assert c2 == pytest.approx(A0_CONSTANT, rel=1e-14)


@pytest.mark.parametrize("seed", range(5))
def test_elliptic_residual_and_boundary(seed):
    o = EllipticExact.random(np.random.default_rng(seed), N=3)
    assert abs(exact_elliptic(o, 0.0)) < 1e-12
    assert abs(exact_elliptic(o, 1.0)) < 1e-12
    x = np.random.default_rng(seed + 10).uniform(0, 1, 101)
    phi, dphi, ddphi = o.derivatives(x)
    assert np.abs(ddphi + dphi - o.rhs(x)).max() <= 1e-10


def test_elliptic_diffusion_triple():
    o = EllipticExact([0.5, 1.0, -0.3], [0.2, 0.7])
    a, f, u = o.diffusion_triple()
    x = np.linspace(0.05, 0.95, 19)
    _, du, ddu = o.derivatives(x)
    # (a u')' = a' u' + a u''
    np.testing.assert_allclose(np.exp(x) * (du + ddu), f(x), rtol=1e-12, atol=1e-12)


def test_elliptic_rejects_bad_lengths():
    with pytest.raises(ValueError):
        EllipticExact([1.0, 2.0], [1.0, 2.0])
