"""Nevanlinna (Ahlfors-Shimizu) characteristic, Riesz mass and growth fits.

Two independent routes to ``T(r, f)``:

* Jensen: circle mean of ``u = log||f||`` minus ``u(0)``.
* Ahlfors: ``int_0^r n(t)/t dt`` with ``n(t) = (1/pi) int_{|z|<=t} ||f'||^2 dm``.
  Exchanging the order of integration gives the single polar integral
  ``(1/pi) int_{|z|<=r} ||f'||^2 log(r/|z|) dm``, whose integrand is bounded
  and vanishes at both ends of the radial range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.optimize import minimize_scalar

from .curve import HoloCurve, norm_log, spherical_derivative_sq
from .errors import InputError, NumericalFailure

EVAL_BUDGET = 10_000_000
CSV_HEADER = "r,t_jensen,t_ahlfors,n_of_r"


@dataclass(frozen=True)
class GrowthSample:
    r: float
    t_jensen: float
    t_ahlfors: float
    n_of_r: float

    def csv_row(self) -> str:
        return ",".join(f"{v:.12g}" for v in (self.r, self.t_jensen, self.t_ahlfors, self.n_of_r))


@dataclass(frozen=True)
class OrderTypeFit:
    order_rho: float
    type_c: float
    r_window: tuple
    rms_residual: float
    offset: float = 0.0  # additive constant absorbed before taking logs

    def to_json(self) -> dict:
        return {"order": self.order_rho, "type": self.type_c, "window": list(self.r_window), "rms": self.rms_residual}


class _Counter:
    def __init__(self, budget: int = EVAL_BUDGET):
        self.count = 0
        self.budget = budget

    def add(self, k: int) -> None:
        self.count += k
        if self.count > self.budget:
            raise NumericalFailure(f"quadrature exceeded the budget of {self.budget} evaluations")


def _min_nodes(rho: float) -> int:
    return int(2 ** math.ceil(math.log2(max(64, 16 * math.ceil(rho)))))


def circle_mean(fn, rho: float, tol: float, m0: int | None = None, counter: _Counter | None = None,
                max_nodes: int = 1 << 22) -> float:
    """Trapezoidal mean of ``fn`` over ``|z| = rho`` with node doubling.

    Stops once two successive estimates differ by at most ``tol``.
    """
    if rho == 0:
        return float(fn(np.zeros(1, dtype=complex))[0])
    m = m0 or _min_nodes(rho)
    theta = 2 * np.pi * np.arange(m) / m
    total = float(np.sum(fn(rho * np.exp(1j * theta))))
    if counter:
        counter.add(m)
    est = total / m
    while True:
        theta = 2 * np.pi * (np.arange(m) + 0.5) / m
        total += float(np.sum(fn(rho * np.exp(1j * theta))))
        if counter:
            counter.add(m)
        m *= 2
        new = total / m
        if abs(new - est) <= tol:
            return new
        est = new
        if m >= max_nodes:
            raise NumericalFailure(f"circle mean at r={rho:g} did not converge to {tol:g}")


def _angular_density(curve: HoloCurve, rho: float, tol: float, counter: _Counter) -> float:
    """``A(rho) = (1/pi) int_0^{2pi} ||f'||^2(rho e^{i theta}) d theta``."""
    return 2.0 * circle_mean(lambda z: spherical_derivative_sq(curve, z), rho, tol / 2, counter=counter)


def _radial_quad(integrand, t: float, tol: float, what: str) -> float:
    val, err, info = quad(integrand, 0.0, t, epsabs=tol, epsrel=0.0, limit=400, full_output=True)[:3]
    if err > tol:
        raise NumericalFailure(f"{what}: radial quadrature error {err:.3g} exceeds {tol:.3g}")
    return float(val)


def riesz_mass(curve: HoloCurve, t: float, tol: float = 1e-8) -> float:
    """``n(t) = mu(|z| <= t) = (1/pi) int_{|z|<=t} ||f'||^2 dm``."""
    if not t > 0:
        raise InputError("riesz_mass needs t > 0")
    counter = _Counter()
    ang_tol = 0.1 * tol / max(t * t, 1.0)
    return _radial_quad(lambda rho: rho * _angular_density(curve, rho, ang_tol, counter), t, tol, "riesz_mass")


def disc_mass(curve: HoloCurve, a: complex, delta: float, tol: float = 1e-9) -> float:
    """``mu(B(a, delta))``, integrated in polar coordinates about ``a``."""
    if not delta > 0:
        raise InputError("disc radius must be positive")
    counter = _Counter()
    ang_tol = 0.1 * tol / max(delta * delta, 1.0)

    def integrand(rho):
        return rho * 2.0 * circle_mean(lambda w: spherical_derivative_sq(curve, a + w), rho, ang_tol / 2,
                                       counter=counter)

    return _radial_quad(integrand, delta, tol, "disc_mass")


def characteristic_ahlfors(curve: HoloCurve, r: float, tol: float = 1e-8) -> float:
    """``T(r) = int_0^r n(t)/t dt`` as ``(1/pi) int ||f'||^2 log(r/|z|) dm``."""
    if not r > 0:
        raise InputError("characteristic needs r > 0")
    counter = _Counter()
    ang_tol = 0.1 * tol / max(r * r, 1.0)

    def integrand(rho):
        if rho <= 0:
            return 0.0
        return rho * math.log(r / rho) * _angular_density(curve, rho, ang_tol, counter)

    return _radial_quad(integrand, r, tol, "characteristic_ahlfors")


def characteristic_jensen(curve: HoloCurve, r: float, m_nodes: int = 64) -> float:
    """``T(r) = mean_{|z|=r} u - u(0)`` with node doubling to ``1e-8 max(1, T)``."""
    if not r > 0:
        raise InputError("characteristic needs r > 0")
    u0 = float(norm_log(curve, 0.0))
    rough = circle_mean(lambda z: norm_log(curve, z), r, 1e-3, m0=max(m_nodes, 8))
    tol = 1e-8 * max(1.0, abs(rough - u0))
    mean = circle_mean(lambda z: norm_log(curve, z), r, tol, m0=max(m_nodes, _min_nodes(r)))
    return mean - u0


def counting_flux(curve: HoloCurve, r: float, tol: float = 1e-9) -> float:
    """``n(r)`` as the flux ``(r / 2pi) int d u / d r d theta`` (Green's identity).

    Gives the Riesz mass from first derivatives on the circle only; used when
    the area quadrature is not requested.
    """
    def radial_derivative(z):
        vals = curve.evaluate(z)
        lm = np.stack([v.log_modulus for v in vals])
        s = np.max(lm, axis=0)
        num = 0.0
        den = 0.0
        for v in vals:
            w = np.exp(v.log_scale - s)
            num = num + v.deriv * w * np.conj(v.unit * w)
            den = den + np.abs(v.unit * w) ** 2
        return np.real(z / np.abs(z) * num / den)

    return r * circle_mean(radial_derivative, r, tol / max(r, 1.0))


def growth_samples(curve: HoloCurve, radii: Iterable[float], method: str = "both", tol: float = 1e-6,
                   workers: int = 1) -> list[GrowthSample]:
    """Characteristic table over ``radii``; ``method`` is ``jensen``, ``ahlfors`` or ``both``."""
    if method not in ("jensen", "ahlfors", "both"):
        raise InputError(f"unknown method {method!r}")
    from .parallel import parallel_map

    def one(r):
        tj = characteristic_jensen(curve, r) if method in ("jensen", "both") else math.nan
        if method in ("ahlfors", "both"):
            ta = characteristic_ahlfors(curve, r, tol)
            n = riesz_mass(curve, r, tol)
        else:
            ta = math.nan
            n = counting_flux(curve, r, tol)
        return GrowthSample(float(r), tj, ta, n)

    return parallel_map(one, sorted(float(r) for r in radii), workers)


def geometric_radii(r0: float, r1: float, k: int) -> np.ndarray:
    """``k`` geometrically spaced radii from ``r0`` to ``r1`` inclusive."""
    if not (0 < r0 <= r1) or k < 1:
        raise InputError("need 0 < r0 <= r1 and k >= 1")
    return np.geomspace(r0, r1, k) if k > 1 else np.array([r0])


def fit_radii(r0: float, r1: float, ratio: float = 2 ** 0.25) -> np.ndarray:
    """Geometric grid from ``r0`` with the given ratio, ending at or just before ``r1``."""
    k = int(math.floor(math.log(r1 / r0) / math.log(ratio) + 1e-9)) + 1
    return r0 * ratio ** np.arange(k)


def _loglog_rms(logr, T, d):
    y = np.log(T - d)
    A = np.vstack([logr, np.ones_like(logr)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    return float(np.sqrt(np.mean(resid**2))), float(coef[0])


def fit_order_type(samples: Sequence[GrowthSample], window: tuple, column: str = "t_jensen") -> OrderTypeFit:
    """Order and type from samples inside ``window``.

    The order is the least-squares slope of ``log(T - d)`` against ``log r``,
    where the additive constant ``d`` is chosen to minimise the residual (it
    absorbs the O(1) offset between characteristic conventions); the type is
    the median of ``(T - d) / r^order`` over the upper half of the window.
    """
    lo, hi = float(window[0]), float(window[1])
    pts = sorted((s.r, getattr(s, column)) for s in samples if lo <= s.r <= hi)
    pts = [(r, t) for r, t in pts if math.isfinite(t)]
    if len(pts) < 8:
        raise InputError(f"need at least 8 samples inside the window, got {len(pts)}")
    r = np.array([p[0] for p in pts])
    T = np.array([p[1] for p in pts])
    if np.any(T <= 0):
        raise InputError("characteristic values must be positive for a log-log fit")
    logr = np.log(r)
    tmin = float(T.min())
    best_rms, best_d = _loglog_rms(logr, T, 0.0)[0], 0.0
    # the residual is not unimodal in d: coarse scan, then bounded refinement
    grid = np.linspace(-float(T.max()), tmin * (1 - 1e-6), 801)
    vals = np.array([_loglog_rms(logr, T, d)[0] for d in grid])
    k = int(np.argmin(vals))
    a, b = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    res = minimize_scalar(lambda d: _loglog_rms(logr, T, d)[0], bounds=(a, b), method="bounded",
                          options={"xatol": 1e-12 * max(1.0, tmin)})
    for d, v in ((float(res.x), float(res.fun)), (float(grid[k]), float(vals[k]))):
        if v < best_rms:
            best_rms, best_d = v, d
    rms, rho = _loglog_rms(logr, T, best_d)
    upper = r >= np.median(r)
    c = float(np.median((T[upper] - best_d) / r[upper] ** rho))
    return OrderTypeFit(rho, c, (lo, hi), rms, best_d)
