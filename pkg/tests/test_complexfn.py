import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import gamma

from brody_lab.complexfn import (
    Lattice,
    Quadratic,
    TruncationPolicy,
    eisenstein_g,
    eval_canonical_product,
    eval_e2_factor,
    eval_exp_poly,
    eval_sigma_reduced,
    legendre_residual,
    log_e2,
    quasi_periods,
    weierstrass_zeta_wp,
)
from brody_lab.complexfn.scaled import linear_combination, multiply, scaled_const, scaled_sin
from brody_lab.errors import InputError


def theta_sigma_mp(z: complex):
    """Weierstrass sigma of Z + iZ from Jacobi theta_1 (independent oracle)."""
    q = mp.exp(-mp.pi)
    z = mp.mpc(z)
    return mp.exp(mp.pi * z**2 / 2) * mp.jtheta(1, mp.pi * z, q) / (mp.pi * mp.jtheta(1, 0, q, 1))


def theta_sigma(z: complex) -> complex:
    return complex(theta_sigma_mp(z))


# ---------------------------------------------------------------- elementary


def test_exp_poly_large_real_part_stays_in_log_domain():
    v = eval_exp_poly(Quadratic(0, 0, 1), 100.0)
    assert float(v.log_modulus) == pytest.approx(1e4)
    assert abs(complex(v.deriv) - 200.0) < 1e-9  # f'/f = 2z


def test_exp_poly_matches_direct_exp():
    P = Quadratic(0.3 - 0.1j, 1 + 2j, -0.5j)
    z = np.array([0.2 + 0.1j, -1.3 + 0.7j])
    v = eval_exp_poly(P, z)
    direct = np.exp(0.3 - 0.1j + (1 + 2j) * z - 0.5j * z * z)
    np.testing.assert_allclose(v.value(), direct, rtol=1e-13)


def test_log_e2_small_argument_matches_series():
    w = 0.1
    series = -sum(w**k / k for k in range(3, 40))
    assert float(log_e2(w).real) == pytest.approx(series, abs=1e-16)
    assert float(log_e2(w).real) == pytest.approx(-3.60515657826e-4, rel=1e-10)


def test_e2_factor_zero_and_log_derivative():
    lm, dlog = eval_e2_factor(0.0)
    assert float(lm) == 0.0 and complex(dlog) == 0
    assert float(log_e2(1.0).real) == -math.inf
    w = 0.4 + 0.3j
    _, d = eval_e2_factor(w)
    assert complex(d) == pytest.approx(-w * w / (1 - w))


@settings(max_examples=60, deadline=None)
@given(st.complex_numbers(max_magnitude=0.9, allow_nan=False, allow_infinity=False))
def test_log_e2_agrees_with_closed_form(w):
    closed = complex(np.log(1 - w) + w + w * w / 2).real
    assert float(log_e2(w).real) == pytest.approx(closed, abs=1e-12)


def test_scaled_sin_zero_is_exact():
    v = scaled_sin(np.pi)
    assert complex(v.unit) == 0
    assert abs(complex(v.deriv) * math.exp(float(v.log_scale)) + 1) < 1e-15


def test_linear_combination_cancels_to_zero():
    a = scaled_const(2.0)
    v = linear_combination([1, -1], [a, a])
    assert float(v.log_modulus) == -math.inf


def test_log_derivative_raises_at_zero():
    with pytest.raises(InputError):
        scaled_sin(0.0).log_derivative()


def test_multiply_adds_log_scales():
    v = multiply(eval_exp_poly(Quadratic(0, 500), 1.0), eval_exp_poly(Quadratic(0, 300), 1.0))
    assert float(v.log_modulus) == pytest.approx(800)


# ---------------------------------------------------------------- lattices


def test_lattice_validation():
    with pytest.raises(InputError):
        Lattice(1, -1j)
    with pytest.raises(InputError):
        Lattice(1, 1)


def test_points_sorted_and_complete():
    pts = Lattice.square().points(2.0)
    assert len(pts) == 13
    assert np.all(np.diff(np.abs(pts)) >= -1e-15)


def test_eisenstein_g4_square_lattice():
    assert eisenstein_g(4, 1j).real == pytest.approx(gamma(0.25) ** 8 / (960 * math.pi**2), rel=1e-12)
    assert abs(eisenstein_g(6, 1j)) < 1e-12


def test_quasi_periods_square():
    e1, e2 = quasi_periods(Lattice.square())
    assert e1 == pytest.approx(math.pi, abs=1e-12)
    assert e2 == pytest.approx(-1j * math.pi, abs=1e-12)


def test_quasi_periods_scaled_lattice():
    e1, _ = quasi_periods(Lattice(2, 2j))
    assert e1 == pytest.approx(math.pi / 2, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(-0.45, 0.45), st.floats(0.8, 2.5), st.floats(0.3, 3.0), st.floats(-math.pi, math.pi))
def test_legendre_relation_random_lattices(re_tau, im_tau, scale, angle):
    w1 = scale * complex(math.cos(angle), math.sin(angle))
    L = Lattice(w1, w1 * complex(re_tau, im_tau))
    e1, e2 = quasi_periods(L)
    assert legendre_residual(L, e1, e2) < 1e-10


@pytest.mark.parametrize("z", [0.3 + 0.2j, 2.7 - 1.1j, 7.3 + 5.2j, -12.4 + 3.9j, 30.1 + 20.3j])
def test_sigma_matches_theta_oracle(z):
    v = eval_sigma_reduced(Lattice.square(), z)
    ref = theta_sigma_mp(z)
    assert float(v.log_modulus) == pytest.approx(float(mp.log(abs(ref))), abs=1e-12 * max(1, abs(z) ** 2))
    assert abs(complex(v.unit) - complex(ref / abs(ref))) < 1e-9


def test_sigma_modulus_minus_gaussian_is_periodic():
    L = Lattice.square()
    rng = np.random.default_rng(3)
    z = 0.31 + 0.17j
    shifts = rng.integers(-20, 21, 100) + 1j * rng.integers(-20, 21, 100)
    w = z + shifts
    vals = eval_sigma_reduced(L, w).log_modulus - (math.pi / 2) * np.abs(w) ** 2
    assert np.ptp(vals) < 1e-8


def test_product_zeros_are_exact():
    L = Lattice.square()
    assert complex(eval_sigma_reduced(L, 1 + 0j).unit) == 0
    L1 = Lattice.square((1 + 1j) / 2)
    assert complex(eval_sigma_reduced(L1, (1 + 1j) / 2).unit) == 0
    assert complex(eval_sigma_reduced(L1, 0).unit) == pytest.approx(1)


def test_zeta_wp_at_half_diagonal():
    zeta, wp = weierstrass_zeta_wp(Lattice.square(), (1 + 1j) / 2)
    assert complex(zeta) == pytest.approx(math.pi * (1 - 1j) / 2, abs=1e-12)
    assert abs(complex(wp)) < 1e-12


def test_shifted_product_equals_sigma_form():
    c = (1 + 1j) / 2
    L1 = Lattice.square(c)
    z = np.array([0.2 + 0.9j, -3.1 + 2.2j, 8.4 - 6.6j])
    lhs = eval_canonical_product(L1, z)
    rhs = np.array([theta_sigma(x - c) / theta_sigma(-c) * np.exp(math.pi * (1 - 1j) / 2 * x) for x in z])
    np.testing.assert_allclose(lhs.log_modulus, np.log(np.abs(rhs)), atol=1e-9)


def test_dual_path_agreement_small():
    rng = np.random.default_rng(0)
    z = 20 * np.sqrt(rng.uniform(size=100)) * np.exp(2j * np.pi * rng.uniform(size=100))
    for L in (Lattice.square(), Lattice.square((1 + 1j) / 2), Lattice(1, 0.3 + 1.2j, 0.1 + 0.2j)):
        a = eval_sigma_reduced(L, z)
        b = eval_canonical_product(L, z)
        np.testing.assert_allclose(a.log_modulus, b.log_modulus, atol=1e-9)
        np.testing.assert_allclose(a.unit, b.unit, atol=1e-8)


def test_truncation_policy_validation():
    with pytest.raises(InputError):
        TruncationPolicy(target_abs_err=0)
    with pytest.raises(InputError):
        TruncationPolicy(safety=0.5)
