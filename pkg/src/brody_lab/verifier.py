"""Numerical checks of the growth inequalities for curves omitting hyperplanes.

A case is a curve ``(f_0, e^{P_1}, ..., e^{P_{n-1}}, 1)``: the last ``n``
components never vanish, so the curve omits the hyperplanes ``{w_j = 0}``,
``1 <= j <= n``.  ``sup_s`` stands in for ``sup_C ||f'||``; it comes from a
finite scan, and an underestimate can only make every check stricter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .curve import (
    Constant,
    ExpPoly,
    HoloCurve,
    spherical_derivative,
    sup_spherical,
)
from .errors import InputError, NumericalFailure
from .growth import OrderTypeFit, disc_mass, fit_order_type, fit_radii, growth_samples
from .harmonic import golden_section_min, lemma1_bound_margin

MAIN_THRESHOLD_FACTOR = 2.0  # main inequality is checked for |z| >= 2|z0|
CHAIN_TOL = 1e-7
CIRCLE_SCAN = 512
R_TOL = 1e-8


@dataclass(frozen=True)
class OmittingCurveCase:
    curve: HoloCurve
    z0: complex
    sup_s: float
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "z0", complex(self.z0))
        for comp in self.curve.components[1:]:
            if not isinstance(comp, (ExpPoly, Constant)):
                raise InputError("components 1..n must be zero-free (exp_poly or constant)")
        f0 = self.curve.components[0].evaluate(self.z0)
        if not (f0.unit == 0 or f0.log_modulus < math.log(1e-9)):
            raise InputError(f"z0={self.z0} is not a zero of f_0")
        if self.sup_s < 0:
            raise InputError("sup_s must be nonnegative")

    @classmethod
    def with_scanned_sup(cls, curve: HoloCurve, z0: complex, radius: float = 20.0, resolution: float = 0.05,
                         label: str = "") -> "OmittingCurveCase":
        return cls(curve, z0, float(sup_spherical(curve, radius, resolution).sup), label)

    @property
    def n(self) -> int:
        return self.curve.n


@dataclass(frozen=True)
class InequalityRecord:
    z: complex
    lhs: float
    rhs: float
    margin: float
    detail: str = ""

    def to_json(self) -> dict:
        return {"z": [self.z.real, self.z.imag], "lhs": self.lhs, "rhs": self.rhs, "margin": self.margin,
                "detail": self.detail}


def _u_star(case: OmittingCurveCase, z):
    u = case.curve.log_moduli(z)
    return u[0], np.max(u[1:], axis=0), u


def main_inequality_arrays(case: OmittingCurveCase, z):
    """``(lhs, rhs)`` of ``u_0(z) <= u*(z) + 4(n+1)|z| sup||f'||`` on an array."""
    z = np.asarray(z, dtype=complex)
    u0, ustar, _ = _u_star(case, z)
    rhs = ustar + 4 * (case.n + 1) * np.abs(z) * case.sup_s
    return u0, rhs


def main_inequality_margin(case: OmittingCurveCase, z: complex) -> InequalityRecord:
    z = complex(z)
    if abs(z) <= abs(case.z0):
        raise InputError("main inequality is only asserted for |z| > |z0|")
    lhs, rhs = main_inequality_arrays(case, z)
    lhs, rhs = float(lhs), float(rhs)
    margin = math.inf if lhs == -math.inf else rhs - lhs
    return InequalityRecord(z, lhs, rhs, margin, "main")


@dataclass(frozen=True)
class SweepResult:
    min_margin: float
    worst: InequalityRecord
    samples: int
    annulus: tuple

    @property
    def passed(self) -> bool:
        return self.min_margin >= 0

    def to_json(self) -> dict:
        return {"min_margin": self.min_margin, "worst": self.worst.to_json(), "samples": self.samples,
                "annulus": list(self.annulus), "passed": self.passed}


def sweep_main_inequality(case: OmittingCurveCase, r_min: float, r_max: float, samples: int = 10_000) -> SweepResult:
    """Minimum margin of the main inequality over a log-radial grid on the annulus."""
    if not r_min > abs(case.z0):
        raise InputError("annulus must start beyond |z0|")
    if not r_max > r_min or samples < 4:
        raise InputError("need r_max > r_min and at least 4 samples")
    n_r = max(2, int(round(math.sqrt(samples))))
    n_t = max(2, samples // n_r)
    radii = np.geomspace(r_min, r_max, n_r)
    theta = 2 * np.pi * np.arange(n_t) / n_t
    z = (radii[:, None] * np.exp(1j * theta[None, :])).ravel()
    lhs, rhs = main_inequality_arrays(case, z)
    with np.errstate(invalid="ignore"):
        margin = np.where(np.isneginf(lhs), np.inf, rhs - lhs)
    k = int(np.argmin(margin))
    worst = InequalityRecord(complex(z[k]), float(lhs[k]), float(rhs[k]), float(margin[k]), "main")
    return SweepResult(float(margin[k]), worst, int(z.size), (float(r_min), float(r_max)))


# --------------------------------------------------------------------------
# boundary chain


def _gap(case: OmittingCurveCase, z):
    u0, ustar, _ = _u_star(case, z)
    with np.errstate(invalid="ignore"):
        return np.where(np.isneginf(u0), -np.inf, u0 - ustar)


def _circle_min(case: OmittingCurveCase, a: complex, rho: float):
    """Minimum of ``u_0 - u*`` on ``|z - a| = rho`` and its location."""
    phi = 2 * np.pi * np.arange(CIRCLE_SCAN) / CIRCLE_SCAN
    vals = _gap(case, a + rho * np.exp(1j * phi))
    if np.any(np.isneginf(vals)):
        k = int(np.argmin(vals))
        return -math.inf, complex(a + rho * np.exp(1j * phi[k]))
    idx = np.argsort(vals)[:3]
    step = 2 * np.pi / CIRCLE_SCAN
    x, f = golden_section_min(lambda p: _gap(case, a + rho * np.exp(1j * p)), phi[idx] - step, phi[idx] + step,
                              1e-12)
    k = int(np.argmin(f))
    if f[k] > vals[idx[0]]:
        return float(vals[idx[0]]), complex(a + rho * np.exp(1j * phi[idx[0]]))
    return float(f[k]), complex(a + rho * np.exp(1j * x[k]))


@dataclass(frozen=True)
class ChainReport:
    a: complex
    R: float
    z1: complex
    k: int
    boundary_residual: float   # |u_0(z1) - u_k(z1)|
    margin_nn: float           # |a| + |z0| - R
    margin_1n: float           # 2R |grad(u_0 - u_k)(z1)| - (u_0(a) - u_k(a))
    margin_lemma1: float       # |grad(u_0 - u_k)(z1)| - (u_0(a) - u_k(a)) / (2R)
    margin_2n: float           # ||f'(z1)|| - |f_0'/f_0 - f_k'/f_k|(z1) / (n+1)

    @property
    def passed(self) -> bool:
        return min(self.margin_nn, self.margin_1n, self.margin_2n) >= -CHAIN_TOL

    def to_json(self) -> dict:
        return {
            "a": [self.a.real, self.a.imag], "R": self.R, "z1": [self.z1.real, self.z1.imag], "k": self.k,
            "boundary_residual": self.boundary_residual, "margin_nn": self.margin_nn,
            "margin_1n": self.margin_1n, "margin_lemma1": self.margin_lemma1, "margin_2n": self.margin_2n,
            "passed": self.passed,
        }


def maximal_disc_radius(case: OmittingCurveCase, a: complex, steps: int = 128):
    """Largest ``R`` with ``u_0 > u*`` on ``B(a, R)``, plus the contact point."""
    upper = abs(a - case.z0)
    phi = 2 * np.pi * np.arange(CIRCLE_SCAN) / CIRCLE_SCAN
    rhos = np.linspace(upper / steps, upper, steps)
    # a coarse scan overestimates the minimum, so a coarse hit is a true hit
    hit_idx = None
    for i, rho in enumerate(rhos):
        if np.min(_gap(case, a + rho * np.exp(1j * phi))) <= 0:
            hit_idx = i
            break
    if hit_idx is None:
        raise NumericalFailure("no boundary contact found before the zero z0")
    while hit_idx > 0 and _circle_min(case, a, float(rhos[hit_idx - 1]))[0] <= 0:
        hit_idx -= 1
    hit = float(rhos[hit_idx])
    prev = float(rhos[hit_idx - 1]) if hit_idx > 0 else 0.0
    lo, hi = prev, hit
    for _ in range(200):
        if hi - lo <= R_TOL:
            break
        mid = 0.5 * (lo + hi)
        if _circle_min(case, a, mid)[0] > 0:
            lo = mid
        else:
            hi = mid
    else:
        raise NumericalFailure("bisection for the maximal disc did not converge in 200 steps")
    R = 0.5 * (lo + hi)
    return R, _circle_min(case, a, R)[1]


def boundary_chain_check(case: OmittingCurveCase, a: complex) -> ChainReport:
    """Locate ``B(a, R)`` and ``z1`` and evaluate the radius bound and inequality chain."""
    a = complex(a)
    u0a, ustar_a, ua = _u_star(case, a)
    if not float(u0a) > float(ustar_a):
        raise InputError("boundary chain needs u_0(a) > u*(a)")
    R, z1 = maximal_disc_radius(case, a)
    _, _, u1 = _u_star(case, z1)
    k = 1 + int(np.argmax(u1[1:]))
    vals = case.curve.evaluate(np.asarray([z1]))
    grad = float(abs(vals[0].log_derivative()[0] - vals[k].log_derivative()[0]))
    drop = float(ua[0] - ua[k])
    sph = float(spherical_derivative(case.curve, z1))
    return ChainReport(
        a, R, z1, k,
        boundary_residual=float(abs(u1[0] - u1[k])),
        margin_nn=abs(a) + abs(case.z0) - R,
        margin_1n=2 * R * grad - drop,
        margin_lemma1=lemma1_bound_margin(grad, drop, R),
        margin_2n=sph - grad / (case.n + 1),
    )


def random_centers(case: OmittingCurveCase, count: int, seed: int, r_max: float = 30.0,
                   max_draws: int = 100_000) -> list[complex]:
    """Seeded points ``a`` with ``|a| > 2|z0|`` and ``u_0(a) > u*(a)``."""
    rng = np.random.default_rng(seed)
    r_min = max(MAIN_THRESHOLD_FACTOR * abs(case.z0), 1e-3)
    out: list[complex] = []
    draws = 0
    while len(out) < count:
        z = np.sqrt(rng.uniform(r_min**2, r_max**2, 256)) * np.exp(2j * np.pi * rng.uniform(size=256))
        ok = _gap(case, z) > 1e-3
        out.extend(complex(x) for x in z[ok])
        draws += 256
        if draws > max_draws:
            raise NumericalFailure("could not find centers with u_0 > u*")
    return out[:count]


# --------------------------------------------------------------------------
# density bound and growth order


def riesz_density_margin(curve: HoloCurve, a: complex, delta: float, sup_s: float, tol: float = 1e-10) -> float:
    """``delta^2 sup^2 - mu(B(a, delta))``; nonnegative for a correct sup."""
    return delta * delta * sup_s * sup_s - disc_mass(curve, complex(a), delta, tol)


@dataclass(frozen=True)
class GrowthReport:
    fit: OrderTypeFit
    threshold: float
    samples: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.fit.order_rho <= self.threshold


def clunie_hayman_report(case: OmittingCurveCase | HoloCurve, r_window=(20.0, 160.0),
                         threshold: float = 1.05, workers: int = 1) -> GrowthReport:
    """Fit order and type on the window; passes when the order is at most ``threshold``."""
    curve = case.curve if isinstance(case, OmittingCurveCase) else case
    radii = fit_radii(*r_window)
    samples = growth_samples(curve, radii, method="jensen", workers=workers)
    return GrowthReport(fit_order_type(samples, r_window), threshold, samples)
