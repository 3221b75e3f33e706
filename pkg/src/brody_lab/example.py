"""A Brody curve in P^n with quadratic growth that omits n - 1 hyperplanes.

``f = (f0, f1, 1, ..., 1)`` where ``f0`` is the genus-2 product over the square
lattice ``Z + iZ`` and ``f1`` the product over the shifted lattice
``Z + iZ + (1+i)/2``, times ``exp(beta z + gamma z^2)`` chosen so that
``g = f1/f0`` is elliptic with periods ``1 + i`` and ``1 - i``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .complexfn import Lattice, quasi_periods, weierstrass_zeta_wp
from .curve import CanonicalProduct, Constant, HoloCurve, Scaled, norm_log, sup_spherical
from .errors import InputError, NumericalFailure
from .growth import characteristic_jensen, fit_order_type, fit_radii, growth_samples

SHIFT = (1 + 1j) / 2
PERIODS = (1 + 1j, 1 - 1j)
EXCLUSION_RADIUS = 0.25
B0_EXPECTED = math.pi / 2


@dataclass(frozen=True)
class ExampleCurve:
    n: int
    curve: HoloCurve
    beta: complex
    gamma: complex
    lattice0: Lattice
    lattice1: Lattice

    @property
    def f0(self):
        return self.curve.components[0]

    @property
    def f1(self):
        return self.curve.components[1]

    def pair(self) -> HoloCurve:
        """The P^1 curve ``(f0, f1)``, i.e. the map ``g = f1/f0``."""
        return HoloCurve((self.f0, self.f1))


def solve_periodizing_exponent(lattice0: Lattice, shift: complex, periods=PERIODS, kmax: int = 3):
    """``(beta, gamma)`` making ``e^{beta z + gamma z^2} P_shift / P_0`` invariant under ``periods``.

    With ``P_shift(z) = sigma(z - c)/sigma(-c) exp(zeta(c) z + wp(c) z^2/2)`` and
    ``sigma(z + w) = +-exp(eta(w)(z + w/2)) sigma(z)`` the ratio picks up
    ``exp((beta + zeta(c)) w + (wp(c)/2 + gamma)(2zw + w^2) - eta(w) c)`` under ``z -> z + w``.
    So ``gamma = -wp(c)/2`` and ``beta w = eta(w) c - zeta(c) w + 2 pi i k_w`` for every
    period; the smallest consistent ``beta`` is returned.
    """
    eta1, eta2 = quasi_periods(lattice0)
    zeta_c, wp_c = (complex(v) for v in weierstrass_zeta_wp(lattice0, shift))
    gamma = -wp_c / 2

    def eta(w: complex) -> complex:
        # w = a omega1 + b omega2 with integer a, b
        m = np.linalg.solve([[lattice0.omega1.real, lattice0.omega2.real],
                             [lattice0.omega1.imag, lattice0.omega2.imag]], [w.real, w.imag])
        a, b = (int(round(x)) for x in m)
        if abs(a * lattice0.omega1 + b * lattice0.omega2 - w) > 1e-9:
            raise InputError(f"{w} is not a lattice period")
        return a * eta1 + b * eta2

    w1, w2 = periods
    best = None
    for k1, k2 in itertools.product(range(-kmax, kmax + 1), repeat=2):
        b1 = (eta(w1) * shift + 2j * math.pi * k1) / w1 - zeta_c
        b2 = (eta(w2) * shift + 2j * math.pi * k2) / w2 - zeta_c
        if abs(b1 - b2) < 1e-9 * max(1.0, abs(b1)) and (best is None or abs(b1) < abs(best)):
            best = 0.5 * (b1 + b2)
    if best is None:
        raise NumericalFailure("no exponent makes the ratio periodic")
    return _clean(best), _clean(gamma)


def _clean(x: complex, tol: float = 1e-12) -> complex:
    return complex(0.0 if abs(x.real) < tol else x.real, 0.0 if abs(x.imag) < tol else x.imag)


def build_example(n: int = 2, beta: complex | None = None, check: bool = True) -> ExampleCurve:
    """Build ``(f0, f1, 1, ..., 1)`` with ``n + 1`` components.

    ``beta`` overrides the solved exponent (used to show the check can fail);
    with ``check`` the elliptic residual is enforced.
    """
    if int(n) != n or n < 2:
        raise InputError("n must be an integer >= 2")
    L0 = Lattice.square()
    L1 = Lattice.square(SHIFT)
    beta0, gamma = solve_periodizing_exponent(L0, SHIFT)
    b = beta0 if beta is None else complex(beta)
    f1 = Scaled(CanonicalProduct(L1), (0j, b, gamma))
    comps = (CanonicalProduct(L0), f1) + tuple(Constant(1.0) for _ in range(n - 1))
    ex = ExampleCurve(int(n), HoloCurve(comps), b, gamma, L0, L1)
    if check and beta is None:
        res = verify_elliptic(ex)
        if res > 1e-8:
            raise NumericalFailure(f"periodicity residual {res:.3g} exceeds 1e-8")
    return ex


# --------------------------------------------------------------------------
# regular growth off the exclusion discs


@dataclass(frozen=True)
class B0Report:
    c_estimate: float
    samples_used: int
    excluded: int
    max_rel_dev: float
    radii: tuple = ()
    deviations: tuple = ()   # per radius, relative to the expected constant
    expected: float = B0_EXPECTED

    @property
    def decreasing(self) -> bool:
        return all(b < a for a, b in zip(self.deviations, self.deviations[1:]))

    @property
    def passed(self) -> bool:
        return abs(self.c_estimate / self.expected - 1) <= 0.02 and self.decreasing

    def to_json(self) -> dict:
        return {"c_estimate": self.c_estimate, "expected": self.expected, "samples_used": self.samples_used,
                "excluded": self.excluded, "max_rel_dev": self.max_rel_dev, "radii": list(self.radii),
                "deviations": list(self.deviations), "passed": self.passed}


def verify_b0(ex: ExampleCurve, radii=(10.0, 20.0, 40.0), angles: int = 256) -> B0Report:
    """Sample ``log|f_j| / r^2`` for ``j = 0, 1`` outside radius-1/4 discs around the zeros of ``f_j``."""
    if min(radii) < 5:
        raise InputError("radii must be >= 5")
    theta = 2 * np.pi * np.arange(angles) / angles
    used = excluded = 0
    devs, last = [], None
    for r in radii:
        z = r * np.exp(1j * theta)
        vals = []
        for comp, lat in ((ex.f0, ex.lattice0), (ex.f1, ex.lattice1)):
            keep = lat.zero_distance(z) >= EXCLUSION_RADIUS
            excluded += int(np.sum(~keep))
            used += int(np.sum(keep))
            vals.append(comp.evaluate(z[keep]).log_modulus / r**2)
        v = np.concatenate(vals)
        devs.append(float(np.max(np.abs(v / B0_EXPECTED - 1))))
        last = v
    c = float(np.median(last))
    return B0Report(c, used, excluded, max(devs), tuple(float(r) for r in radii), tuple(devs))


# --------------------------------------------------------------------------
# ellipticity of g = f1/f0


def _log_ratio(ex: ExampleCurve, z):
    a = ex.f0.evaluate(z)
    b = ex.f1.evaluate(z)
    return b.log_scale - a.log_scale, b.unit / a.unit


def elliptic_residual(ex: ExampleCurve, periods=PERIODS, points: int = 200, seed: int = 0,
                      box: float = 5.0) -> float:
    """``max |g(z + w) - g(z)| / (1 + |g(z)|)`` over random ``z`` and the given periods."""
    rng = np.random.default_rng(seed)
    z = np.empty(0, dtype=complex)
    while z.size < points:
        cand = rng.uniform(-box, box, points) + 1j * rng.uniform(-box, box, points)
        cand = cand[ex.lattice0.zero_distance(cand) > 1e-3]
        z = np.concatenate([z, cand])
    z = z[:points]
    ls, u = _log_ratio(ex, z)
    g = u * np.exp(ls)
    worst = 0.0
    for w in periods:
        ls_w, u_w = _log_ratio(ex, z + w)
        gw = u_w * np.exp(ls_w)
        worst = max(worst, float(np.max(np.abs(gw - g) / (1 + np.abs(g)))))
    return worst


def verify_elliptic(ex: ExampleCurve, tol: float = 1e-8, periods=PERIODS) -> float:
    """Residual of the double periodicity of ``g``; the check passes when it is at most ``tol``."""
    if not tol > 0:
        raise InputError("tol must be positive")
    return elliptic_residual(ex, periods)


# --------------------------------------------------------------------------
# Brody property and divergence of |f0|^2 + |f1|^2


@dataclass(frozen=True)
class BrodyReport:
    b_radii: tuple
    b_minima: tuple          # min over |z| = r of log(|f0|^2 + |f1|^2)
    shell_edges: tuple
    shell_max: tuple
    shell_stability: float
    diff_radii: tuple
    log10_diff: tuple        # log10 max over |z| = r of | ||f'||^2 - g#^2 |

    @property
    def b_increasing(self) -> bool:
        return all(b > a for a, b in zip(self.b_minima, self.b_minima[1:]))

    @property
    def diff_decreasing(self) -> bool:
        return all(b < a for a, b in zip(self.log10_diff, self.log10_diff[1:]))

    @property
    def passed(self) -> bool:
        return self.b_increasing and self.shell_stability <= 0.05 and self.diff_decreasing

    def to_json(self) -> dict:
        return {"b_radii": list(self.b_radii), "b_minima": list(self.b_minima),
                "b_increasing": self.b_increasing, "shell_edges": list(self.shell_edges),
                "shell_max": list(self.shell_max), "shell_stability": self.shell_stability,
                "diff_radii": list(self.diff_radii), "log10_diff": list(self.log10_diff),
                "diff_decreasing": self.diff_decreasing, "passed": self.passed}


def pair_log_norm_sq(ex: ExampleCurve, z) -> np.ndarray:
    """``log(|f0|^2 + |f1|^2)``."""
    return 2 * norm_log(ex.pair(), z)


def log_difference_term(ex: ExampleCurve, z) -> np.ndarray:
    """``log | ||f'||^2 - g#^2 |`` with ``g#`` the spherical derivative of ``(f0, f1)``.

    With ``v_j = f_j e^{-s}``, ``s = max log|f_j|``, ``S = |v0|^2 + |v1|^2`` and
    ``E = (n-1) e^{-2s}`` the difference is
    ``E [(|v0'|^2 + |v1'|^2) S^2 - |W|^2 (2S + E)] / (S^2 (S + E)^2)``; only
    its logarithm is formed, so nothing underflows.
    """
    z = np.asarray(z, dtype=complex)
    a, b = ex.f0.evaluate(z), ex.f1.evaluate(z)
    la, lb = a.log_modulus, b.log_modulus
    s = np.maximum(la, lb)
    wa, wb = np.exp(a.log_scale - s), np.exp(b.log_scale - s)
    v0, d0 = a.unit * wa, a.deriv * wa
    v1, d1 = b.unit * wb, b.deriv * wb
    S = np.abs(v0) ** 2 + np.abs(v1) ** 2
    log_e = math.log(ex.n - 1) - 2 * s
    E = np.exp(log_e)
    W2 = np.abs(d0 * v1 - v0 * d1) ** 2
    bracket = (np.abs(d0) ** 2 + np.abs(d1) ** 2) * S**2 - W2 * (2 * S + E)
    with np.errstate(divide="ignore"):
        return log_e + np.log(np.abs(bracket)) - 2 * np.log(S) - 2 * np.log(S + E)


def verify_brody_and_b(ex: ExampleCurve, r_list=(4.0, 8.0, 12.0), b_radii=(5.0, 10.0, 20.0, 40.0),
                       diff_radii=(5.0, 10.0, 20.0), resolution: float = 0.05, angles: int = 4096) -> BrodyReport:
    theta = 2 * np.pi * np.arange(angles) / angles
    b_min = tuple(float(np.min(pair_log_norm_sq(ex, r * np.exp(1j * theta)))) for r in b_radii)
    est = sup_spherical(ex.curve, max(r_list), resolution, edges=(0.0,) + tuple(sorted(r_list)))
    diffs = tuple(float(np.max(log_difference_term(ex, r * np.exp(1j * theta))) / math.log(10))
                  for r in diff_radii)
    return BrodyReport(tuple(float(r) for r in b_radii), b_min, est.shell_edges, est.shell_max, est.stability,
                       tuple(float(r) for r in diff_radii), diffs)


# --------------------------------------------------------------------------
# quadratic characteristic


@dataclass(frozen=True)
class ExampleGrowth:
    order_rho: float
    type_c: float
    c1_by_radius: dict       # r -> T(r)/r^2
    c1_drift: float          # relative change of T(r)/r^2 between the two check radii

    @property
    def passed(self) -> bool:
        return abs(self.order_rho - 2) <= 0.05 and self.c1_drift <= 0.05

    def to_json(self) -> dict:
        return {"order": self.order_rho, "type": self.type_c,
                "c1": {f"{r:g}": v for r, v in self.c1_by_radius.items()}, "c1_drift": self.c1_drift,
                "passed": self.passed}


def example_growth(ex: ExampleCurve, window=(10.0, 40.0), check_radii=(20.0, 40.0), workers: int = 1) -> ExampleGrowth:
    samples = growth_samples(ex.curve, fit_radii(*window), method="jensen", workers=workers)
    fit = fit_order_type(samples, window)
    c1 = {float(r): characteristic_jensen(ex.curve, r) / r**2 for r in check_radii}
    vals = list(c1.values())
    drift = abs(vals[-1] - vals[0]) / abs(vals[-1])
    return ExampleGrowth(fit.order_rho, fit.type_c, c1, drift)


def padding_difference(n: int, points: int = 100, seed: int = 0, box: float = 10.0) -> float:
    """``max |u_n - u_2|`` at random points; bounded by ``log(n - 1) / 2``."""
    rng = np.random.default_rng(seed)
    z = rng.uniform(-box, box, points) + 1j * rng.uniform(-box, box, points)
    return float(np.max(np.abs(norm_log(build_example(n).curve, z) - norm_log(build_example(2).curve, z))))


VERIFY_CHOICES = ("all", "b0", "elliptic", "brody", "growth")


def example_report(n: int = 2, verify: str = "all", workers: int = 1) -> dict:
    """Build the curve and run the requested checks; ``passed`` aggregates them."""
    if verify not in VERIFY_CHOICES:
        raise InputError(f"verify must be one of {VERIFY_CHOICES}")
    ex = build_example(n)
    out: dict = {"n": ex.n, "beta": [ex.beta.real, ex.beta.imag], "gamma": [ex.gamma.real, ex.gamma.imag],
                 "components": len(ex.curve.components)}
    ok = True
    if verify in ("all", "elliptic"):
        res = verify_elliptic(ex)
        res_one = verify_elliptic(ex, periods=(1.0,))
        passed = res <= 1e-8 and res_one > 1e-2
        out["elliptic"] = {"residual": res, "residual_period_1": res_one, "passed": passed}
        ok &= passed
    if verify in ("all", "b0"):
        rep = verify_b0(ex)
        out["b0"] = rep.to_json()
        ok &= rep.passed
    if verify in ("all", "brody"):
        rep = verify_brody_and_b(ex)
        out["brody"] = rep.to_json()
        ok &= rep.passed
    if verify in ("all", "growth"):
        rep = example_growth(ex, workers=workers)
        out["growth"] = rep.to_json()
        ok &= rep.passed
        if ex.n > 2:
            d = padding_difference(ex.n)
            bound = 0.5 * math.log(ex.n - 1)
            out["padding"] = {"max_u_difference": d, "bound": bound, "passed": d <= bound}
            ok &= d <= bound
    out["passed"] = bool(ok)
    return out
