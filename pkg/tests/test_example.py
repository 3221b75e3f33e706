import math

import numpy as np
import pytest

from brody_lab.complexfn import Lattice, quasi_periods
from brody_lab.curve import norm_log
from brody_lab.errors import InputError
from brody_lab.example import (
    B0_EXPECTED,
    build_example,
    example_growth,
    example_report,
    log_difference_term,
    padding_difference,
    solve_periodizing_exponent,
    verify_b0,
    verify_brody_and_b,
    verify_elliptic,
)


@pytest.fixture(scope="module")
def ex():
    return build_example(2)


def test_construction(ex):
    assert len(ex.curve.components) == 3
    assert ex.f0.evaluate(1 + 0j).unit == 0
    assert ex.f1.evaluate((1 + 1j) / 2).unit == 0
    assert len(build_example(4).curve.components) == 5
    with pytest.raises(InputError):
        build_example(1)


def test_zero_sets_disjoint(ex):
    pts0 = ex.lattice0.points(6)
    d = ex.lattice1.zero_distance(pts0)
    assert d.min() == pytest.approx(math.sqrt(2) / 2, abs=1e-14)
    assert np.all(np.abs(ex.f1.evaluate(pts0).unit) > 0)
    ex.curve.check_no_common_zeros(samples=1000)


def test_periodizing_exponent(ex):
    # the genus-2 product on the shifted lattice already carries exp(zeta(c) z)
    assert ex.beta == 0 and ex.gamma == 0
    beta, gamma = solve_periodizing_exponent(Lattice.square(), (1 + 1j) / 2)
    assert (beta, gamma) == (0, 0)


def test_quasi_period_residuals():
    for L in (Lattice.square(), Lattice.square((1 + 1j) / 2)):
        e1, e2 = quasi_periods(L)
        assert abs(e1 * L.omega2 - e2 * L.omega1 - 2j * math.pi) <= 1e-10


def test_elliptic_residuals(ex):
    assert verify_elliptic(ex) <= 1e-8
    assert verify_elliptic(build_example(2, beta=ex.beta + 0.1)) > 1e-2
    assert verify_elliptic(ex, periods=(1.0,)) > 1e-2
    # exponent that ignores the zeta(c) factor carried by the product
    assert verify_elliptic(build_example(2, beta=math.pi * (1 - 1j) / 2)) > 1e-2


def test_b0(ex):
    rep = verify_b0(ex)
    assert rep.c_estimate == pytest.approx(B0_EXPECTED, rel=0.02)
    assert rep.deviations[-1] < rep.deviations[0]
    assert rep.excluded > 0 and rep.passed
    with pytest.raises(InputError):
        verify_b0(ex, radii=(4,))


def test_b0_excludes_zero_samples(ex):
    # an angle grid that lands on the lattice point 10 must exclude it
    rep = verify_b0(ex, radii=(10.0,), angles=4)
    assert rep.excluded >= 4  # 10, 10i, -10, -10i are zeros of f0
    assert rep.samples_used + rep.excluded == 8


def test_brody_and_divergence(ex):
    rep = verify_brody_and_b(ex)
    assert rep.b_increasing and rep.b_minima[2] > rep.b_minima[0]
    assert rep.shell_stability <= 0.05
    assert rep.diff_decreasing
    assert rep.passed


def test_difference_term_is_finite_log(ex):
    v = log_difference_term(ex, 20 * np.exp(1j * np.linspace(0, 1, 5)))
    assert np.all(np.isfinite(v)) and np.all(v < -100)


def test_growth_quadratic(ex):
    g = example_growth(ex)
    assert g.order_rho == pytest.approx(2.0, abs=0.05)
    assert g.c1_drift <= 0.05
    assert g.c1_by_radius[40.0] == pytest.approx(math.pi / 2, rel=0.01)


def test_padding_bounded():
    assert padding_difference(5) <= 0.5 * math.log(4)
    rng = np.random.default_rng(1)
    z = rng.uniform(-1, 1, 50) + 1j * rng.uniform(-1, 1, 50)
    d = norm_log(build_example(5).curve, z) - norm_log(build_example(2).curve, z)
    assert np.all(d >= 0) and np.all(d <= 0.5 * math.log(4))


def test_report_subset():
    rep = example_report(2, "elliptic")
    assert rep["passed"] and "b0" not in rep
    with pytest.raises(InputError):
        example_report(2, "bogus")
