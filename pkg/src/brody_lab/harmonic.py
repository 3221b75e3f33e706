"""Exact harmonic-polynomial test bed for the boundary gradient lemma.

A case is a disc ``B(a, R)`` with trigonometric-polynomial boundary data
``h(theta) = sum_{|k|<=K} c_k e^{ik theta}`` (``c_{-k} = conj(c_k)``).  Its
harmonic extension is the polynomial ``u = Re F`` with
``F(z) = c_0 + 2 sum_{k>=1} c_k ((z - a)/R)^k``, so values and gradients are
exact and no quadrature is involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .parallel import parallel_map

COARSE_ANGLES = 256
THETA_TOL = 1e-10
_GOLD = (math.sqrt(5) - 1) / 2


@dataclass(frozen=True)
class HarmonicDiscCase:
    center: complex
    radius: float
    coeffs: np.ndarray  # c_0 .. c_K
    zero_angle: float

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex).copy()
        if c.ndim != 1 or c.size < 1:
            raise InputError("coeffs must be a 1-d sequence c_0..c_K")
        c[0] = c[0].real
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "center", complex(self.center))
        if not self.radius > 0:
            raise InputError("radius must be positive")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def boundary_zero(self) -> complex:
        return self.center + self.radius * np.exp(1j * self.zero_angle)

    def boundary(self, theta) -> np.ndarray:
        """``h(theta)``."""
        theta = np.asarray(theta, dtype=float)
        k = np.arange(1, len(self.coeffs))
        return self.coeffs[0].real + 2 * np.real(np.exp(1j * theta[..., None] * k) @ self.coeffs[1:])

    def to_json(self) -> dict:
        return {
            "center": [float(self.center.real), float(self.center.imag)],
            "radius": float(self.radius),
            "zero_angle": float(self.zero_angle),
            "coeffs": [[float(c.real), float(c.imag)] for c in self.coeffs],
        }


def poisson_eval(case: HarmonicDiscCase, z):
    """``(u(z), grad u(z))`` with the gradient as the complex number ``u_x + i u_y``."""
    z = np.asarray(z, dtype=complex)
    zeta = (z - case.center) / case.radius
    if np.any(np.abs(zeta) > 1 + 1e-12):
        raise InputError("poisson_eval called outside the closed disc")
    c = case.coeffs
    F = np.zeros_like(zeta)
    dF = np.zeros_like(zeta)
    for k in range(len(c) - 1, 0, -1):
        F = (F + 2 * c[k]) * zeta
        dF = dF * zeta + 2 * k * c[k]
    u = c[0].real + F.real
    grad = np.conj(dF / case.radius)
    return u, grad


def _circle_values(case: HarmonicDiscCase, t, phi):
    """``u(a + t e^{i phi})`` for broadcastable ``t`` and ``phi``."""
    rho = np.asarray(t, dtype=float) / case.radius
    c = case.coeffs
    acc = np.zeros(np.broadcast(rho, phi).shape, dtype=complex)
    e = np.exp(1j * np.asarray(phi))
    for k in range(len(c) - 1, 0, -1):
        acc = (acc + 2 * c[k]) * (rho * e)
    return c[0].real + acc.real


def sample_positive_boundary(seed: int, degree: int, theta1: float, center: complex = 0j, radius: float = 1.0,
                             q: np.ndarray | None = None, delta: float = 1e-3) -> HarmonicDiscCase:
    """``h(theta) = (1 - cos(theta - theta1)) (|q(theta)|^2 + delta)``.

    ``q(theta) = sum_{k<K} a_k e^{ik theta}`` has random complex coefficients
    unless given.  ``h`` is a nonnegative trigonometric polynomial of degree
    ``K`` with an exact zero at ``theta1``.
    """
    if degree < 1:
        raise InputError("degree must be >= 1")
    if q is None:
        rng = np.random.default_rng(seed)
        q = rng.normal(size=degree) + 1j * rng.normal(size=degree)
    q = np.asarray(q, dtype=complex)
    # coefficients of |q|^2 on k = -(K-1)..(K-1)
    sq = np.convolve(q, np.conj(q[::-1]))
    sq[len(q) - 1] += delta
    factor = np.array([-0.5 * np.exp(1j * theta1), 1.0, -0.5 * np.exp(-1j * theta1)])
    full = np.convolve(sq, factor)  # k = -K..K
    mid = len(full) // 2
    return HarmonicDiscCase(center, radius, full[mid:], float(theta1))


def lemma1_bound_margin(grad_abs: float, u_center: float, radius: float) -> float:
    """``|grad u(z1)| - u(a) / (2R)``; nonnegative when the gradient lemma holds."""
    return grad_abs - u_center / (2 * radius)


def lemma1_margin(case: HarmonicDiscCase) -> float:
    _, grad = poisson_eval(case, case.boundary_zero)
    return lemma1_bound_margin(float(abs(grad)), float(case.coeffs[0].real), case.radius)


def golden_section_min(fun, lo, hi, tol):
    """Vectorised golden-section search on independent brackets ``[lo, hi]``."""
    a, b = lo.copy(), hi.copy()
    c = b - _GOLD * (b - a)
    d = a + _GOLD * (b - a)
    fc, fd = fun(c), fun(d)
    while np.max(b - a) > tol:
        left = fc < fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        d_new = np.where(left, c, a + _GOLD * (b - a))
        c_new = np.where(left, b - _GOLD * (b - a), d)
        fd_new = np.where(left, fc, np.nan)
        fc_new = np.where(left, np.nan, fd)
        c, d = c_new, d_new
        need_c = np.isnan(fc_new)
        need_d = np.isnan(fd_new)
        fc = np.where(need_c, fun(c), fc_new)
        fd = np.where(need_d, fun(d), fd_new)
    x = (a + b) / 2
    return x, fun(x)


def circle_minima(case: HarmonicDiscCase, t, candidates: int = 3) -> np.ndarray:
    """``b(t) = min_{|z - a| = t} u(z)``: coarse scan plus golden-section refinement."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t <= 0) or np.any(t > case.radius * (1 + 1e-12)):
        raise InputError("radii must lie in (0, R]")
    phi = 2 * np.pi * np.arange(COARSE_ANGLES) / COARSE_ANGLES
    vals = _circle_values(case, t[:, None], phi[None, :])
    is_min = (vals <= np.roll(vals, 1, axis=1)) & (vals <= np.roll(vals, -1, axis=1))
    ranked = np.where(is_min, vals, np.inf)
    idx = np.argsort(ranked, axis=1)[:, :candidates]
    centre = phi[idx]
    step = 2 * np.pi / COARSE_ANGLES
    tt = np.broadcast_to(t[:, None], centre.shape)
    _, fmin = golden_section_min(lambda p: _circle_values(case, tt, p), centre - step, centre + step, THETA_TOL)
    fmin = np.where(np.isfinite(np.take_along_axis(ranked, idx, axis=1)), fmin, np.inf)
    return np.minimum(fmin.min(axis=1), vals.min(axis=1))


@dataclass(frozen=True)
class CircleMinProfile:
    t: np.ndarray
    b: np.ndarray
    monotone_margin: float  # min_i b(t_i) - b(t_{i+1}); >= 0 when nonincreasing
    harnack_margin: float   # min_i b(t_i) - u(a)(R - t_i)/(R + t_i)
    hadamard_margin: float  # min_i slope_i - slope_{i+1} of b against log t

    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.t.tolist(), self.b.tolist()))

    def passes(self, mono_tol: float = 1e-8, harnack_tol: float = 1e-9) -> bool:
        return (self.monotone_margin >= -mono_tol and self.harnack_margin >= -harnack_tol
                and self.hadamard_margin >= -mono_tol)


def circle_min_profile(case: HarmonicDiscCase, t_grid) -> CircleMinProfile:
    """``b(t)`` on ``t_grid`` together with the three proof-step checks.

    Checks: ``b`` is nonincreasing; Harnack's lower bound
    ``b(t) >= u(a)(R - t)/(R + t)``; and ``t b'(t)`` nonincreasing, tested
    exactly in discrete form as nonincreasing secant slopes of ``b`` against
    ``log t`` (concavity in ``log t``).
    """
    t = np.sort(np.asarray(t_grid, dtype=float))
    b = circle_minima(case, t)
    ua = float(case.coeffs[0].real)
    R = case.radius
    harnack = float(np.min(b - ua * (R - t) / (R + t)))
    mono = float(np.min(b[:-1] - b[1:])) if len(t) > 1 else math.inf
    if len(t) > 2:
        slopes = np.diff(b) / np.diff(np.log(t))
        hadamard = float(np.min(slopes[:-1] - slopes[1:]))
    else:
        hadamard = math.inf
    return CircleMinProfile(t, b, mono, harnack, hadamard)


@dataclass(frozen=True)
class Lemma1Report:
    trials: int
    max_degree: int
    seed: int
    min_margin: float
    argmin_case: dict
    min_harnack_margin: float
    min_monotone_margin: float
    min_hadamard_margin: float

    @property
    def passed(self) -> bool:
        return (self.min_margin >= -1e-9 and self.min_harnack_margin >= -1e-9
                and self.min_monotone_margin >= -1e-8 and self.min_hadamard_margin >= -1e-8)

    def to_json(self) -> dict:
        return {
            "trials": self.trials,
            "max_degree": self.max_degree,
            "seed": self.seed,
            "min_margin": self.min_margin,
            "argmin_case": self.argmin_case,
            "min_harnack_margin": self.min_harnack_margin,
            "min_monotone_margin": self.min_monotone_margin,
            "min_hadamard_margin": self.min_hadamard_margin,
            "passed": self.passed,
        }


def random_case(seed: int, index: int, max_degree: int) -> HarmonicDiscCase:
    rng = np.random.default_rng([seed, index])
    degree = int(rng.integers(1, max_degree + 1))
    center = complex(rng.uniform(-5, 5), rng.uniform(-5, 5))
    radius = float(rng.uniform(0.5, 4.0))
    theta1 = float(rng.uniform(-np.pi, np.pi))
    case_seed = int(rng.integers(0, 2**31 - 1))
    return sample_positive_boundary(case_seed, degree, theta1, center=center, radius=radius)


def lemma1_suite(trials: int = 1000, max_degree: int = 8, seed: int = 42, radii: int = 16,
                 workers: int = 1) -> Lemma1Report:
    """Margins of the gradient lemma and its proof steps over seeded random cases."""
    if trials < 1 or max_degree < 1:
        raise InputError("trials and degree must be positive")

    def one(i):
        case = random_case(seed, i, max_degree)
        t = case.radius * np.arange(1, radii + 1) / radii
        prof = circle_min_profile(case, t)
        return lemma1_margin(case), prof, case

    results = parallel_map(one, range(trials), workers)
    margins = [m for m, _, _ in results]
    k = int(np.argmin(margins))
    return Lemma1Report(
        trials, max_degree, seed,
        float(margins[k]), results[k][2].to_json(),
        min(p.harnack_margin for _, p, _ in results),
        min(p.monotone_margin for _, p, _ in results),
        min(p.hadamard_margin for _, p, _ in results),
    )
