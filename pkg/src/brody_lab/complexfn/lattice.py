"""Lattices and genus-2 canonical products over them.

Two independent evaluation routes are provided for ``f(z) = prod_w E2(z/w)``
(times the bare factor ``z`` when ``0`` is a lattice point):

* :func:`eval_sigma_reduced` -- production path.  ``z`` is reduced into the
  fundamental cell, the product is evaluated there (disc-truncated product plus
  an Eisenstein-series tail correction) and the result is transported back
  with the quasi-periods.  Cost is independent of ``|z|``.
* :func:`eval_canonical_product` -- oracle path.  The lattice is split into
  rows ``{n + b : n in Z}``; each row product has a closed form through
  ``sin`` and ``cot``, and rows are truncated with an explicit tail bound.
  No quasi-periods and no Eisenstein series are involved.

Everything is computed in coordinates normalised by the first vector of a
Lagrange-reduced basis, so the working lattice is ``Z + tau Z`` with
``|tau| >= 1`` and ``|Re tau| <= 1/2``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import zeta as _riemann_zeta

from ..errors import InputError, NumericalFailure
from .elementary import log_e2
from .scaled import (
    ScaledValue,
    divide_const,
    multiply,
    normalize,
    scaled_exp,
    scaled_sin,
)

_EPS = np.finfo(float).eps
_TAIL_KMAX = 40          # highest power kept in the cell tail series
_QSERIES_KMAX = 12       # G_k from q-expansions up to this k, direct shells above
LEGENDRE_TOL = 1e-10


@dataclass(frozen=True)
class Lattice:
    """The point set ``{m*omega1 + n*omega2 + offset}``; requires Im(omega2/omega1) > 0."""

    omega1: complex = 1 + 0j
    omega2: complex = 1j
    offset: complex = 0j

    def __post_init__(self):
        for name in ("omega1", "omega2", "offset"):
            v = complex(getattr(self, name))
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise InputError(f"lattice {name} must be finite")
            object.__setattr__(self, name, v)
        if self.omega1 == 0 or not (self.omega2 / self.omega1).imag > 0:
            raise InputError("lattice basis must satisfy Im(omega2/omega1) > 0")

    @classmethod
    def square(cls, offset: complex = 0j) -> "Lattice":
        return cls(1 + 0j, 1j, offset)

    @property
    def contains_origin(self) -> bool:
        return _tables(self).offset_norm is None

    def points(self, radius: float) -> np.ndarray:
        """All points with ``|w| <= radius``, by increasing modulus then angle."""
        tab = _tables(self)
        shift = 0j if tab.offset_norm is None else tab.offset_norm
        pts = _enumerate(tab.tau, shift, radius / abs(tab.w1)) * tab.w1
        return _sort_points(pts[np.abs(pts) <= radius])

    def zero_distance(self, z) -> np.ndarray:
        """Distance from ``z`` to the nearest lattice point."""
        tab = _tables(self)
        zn = np.asarray(z, dtype=complex) / tab.w1
        if tab.offset_norm is not None:
            zn = zn - tab.offset_norm
        zr, _, _ = _reduce(tab.tau, zn)
        best = np.abs(zr)
        for dm in (-1, 0, 1):
            for dn in (-1, 0, 1):
                best = np.minimum(best, np.abs(zr - dm - dn * tab.tau))
        return best * abs(tab.w1)


@dataclass(frozen=True)
class TruncationPolicy:
    """Truncation control for the direct product.

    ``target_abs_err`` bounds the error of the log-modulus, ``min_radius`` forces
    rows at least this far (in |Im|, user units) to be included, ``safety``
    divides the target before the tail bound is applied.
    """

    target_abs_err: float = 1e-12
    min_radius: float = 0.0
    safety: float = 2.0

    def __post_init__(self):
        if not self.target_abs_err > 0:
            raise InputError("target_abs_err must be positive")
        if self.safety < 1:
            raise InputError("safety must be >= 1")
        if self.min_radius < 0:
            raise InputError("min_radius must be nonnegative")


# --------------------------------------------------------------------------
# precomputed tables


@dataclass(frozen=True)
class _Tables:
    w1: complex                  # scale: first reduced basis vector
    tau: complex                 # second reduced vector / w1
    user_coords: tuple           # user omega_i / w1 as integer pairs (a, b): a + b tau
    cell_points: np.ndarray      # normalised lattice points 0 < |p| <= r0
    tail: np.ndarray             # tail[k] = sum_{|p| > r0} p^-k
    eta: tuple                   # normalised quasi-periods for (1, tau)
    offset_norm: complex | None  # reduced offset / w1, None if the offset is a lattice point
    offset_consts: tuple | None  # (c, sigma(-c), zeta(c), wp(c)) in user coordinates


def _lagrange_reduce(a: complex, b: complex):
    """Lagrange-Gauss reduction; returns the reduced pair and its integer matrix."""
    U = [[1, 0], [0, 1]]
    for _ in range(200):
        if abs(b) < abs(a):
            a, b = b, a
            U = [U[1], U[0]]
        mu = round((b * a.conjugate()).real / abs(a) ** 2)
        if mu == 0:
            break
        b = b - mu * a
        U[1] = [U[1][0] - mu * U[0][0], U[1][1] - mu * U[0][1]]
    if (b / a).imag < 0:
        b = -b
        U[1] = [-U[1][0], -U[1][1]]
    return a, b, U


def _coords(v: complex, tau: complex):
    y = v.imag / tau.imag
    return v.real - y * tau.real, y


def _reduce(tau: complex, zn):
    """Split ``zn = zr + m + n*tau`` with the coordinates of ``zr`` in [-1/2, 1/2]."""
    zn = np.asarray(zn, dtype=complex)
    y = zn.imag / tau.imag
    x = zn.real - y * tau.real
    m = np.round(x)
    n = np.round(y)
    return zn - m - n * tau, m, n


def _enumerate(tau: complex, shift: complex, radius: float) -> np.ndarray:
    """Normalised points ``m + n tau + shift`` with modulus <= radius (unsorted)."""
    nmax = int(math.ceil((radius + abs(shift)) / tau.imag)) + 1
    n = np.arange(-nmax, nmax + 1)
    mmax = int(math.ceil(radius + abs(shift) + abs(tau.real) * nmax)) + 1
    m = np.arange(-mmax, mmax + 1)
    pts = (m[None, :] + n[:, None] * tau + shift).ravel()
    return pts[np.abs(pts) <= radius]


def _sort_points(pts: np.ndarray) -> np.ndarray:
    mod = np.round(np.abs(pts), 12)
    ang = np.round(np.angle(pts), 12)
    return pts[np.lexsort((ang, mod))]


def _divisor_sigma(n: int, p: int) -> int:
    total = 0
    d = 1
    while d * d <= n:
        if n % d == 0:
            total += d**p
            e = n // d
            if e != d:
                total += e**p
        d += 1
    return total


def eisenstein_g(k: int, tau: complex) -> complex:
    """``G_k(tau) = sum' (m + n tau)^-k`` for even ``k >= 4`` via its q-expansion."""
    if k < 4 or k % 2:
        raise InputError("eisenstein_g needs even k >= 4")
    q = np.exp(2j * np.pi * tau)
    aq = abs(q)
    coef = 2 * (2j * np.pi) ** k / math.factorial(k - 1)
    re_terms, im_terms = [2 * float(_riemann_zeta(k, 1))], [0.0]
    n = 1
    qn = q
    while True:
        term = coef * _divisor_sigma(n, k - 1) * qn
        re_terms.append(term.real)
        im_terms.append(term.imag)
        if n > 5 and abs(term) < 1e-20 and (n + 1) ** (k - 1) * aq ** (n + 1) * abs(coef) < 1e-20:
            break
        n += 1
        qn = qn * q
        if n > 2000:
            raise NumericalFailure("Eisenstein q-series did not converge")
    return complex(math.fsum(re_terms), math.fsum(im_terms))


def _csum(values: np.ndarray) -> complex:
    return complex(math.fsum(values.real), math.fsum(values.imag))


def _cell_raw(tab: _Tables, z: np.ndarray):
    """``(rest, drest, wp_rest)`` with ``sigma(z) = z exp(rest)`` near the origin.

    ``drest = zeta(z) - 1/z`` and ``wp_rest = wp(z) - 1/z^2``.
    """
    z = np.asarray(z, dtype=complex)
    p = tab.cell_points
    zz = z[..., None]
    w = zz / p
    rest = log_e2(w).sum(axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        drest = (1 / (zz - p) + 1 / p + zz / (p * p)).sum(axis=-1)
        wp_rest = (1 / (zz - p) ** 2 - 1 / (p * p)).sum(axis=-1)
    t = tab.tail
    # Horner for sum_k z^k t_k / k, its derivative and second derivative
    poly = np.zeros_like(z)
    dpoly = np.zeros_like(z)
    ddpoly = np.zeros_like(z)
    for k in range(len(t) - 1, 2, -1):
        poly = poly * z + t[k] / k
        dpoly = dpoly * z + t[k]
        ddpoly = ddpoly * z + (k - 1) * t[k]
    rest = rest - poly * z**3
    drest = drest - dpoly * z**2
    wp_rest = wp_rest + ddpoly * z
    return rest, drest, wp_rest


def _cell_sigma(tab: _Tables, z: np.ndarray) -> ScaledValue:
    rest, drest, _ = _cell_raw(tab, z)
    ph = np.exp(1j * rest.imag)
    return normalize(rest.real, z * ph, (1 + z * drest) * ph)


@functools.lru_cache(maxsize=128)
def _tables(L: Lattice) -> _Tables:
    a, b, U = _lagrange_reduce(L.omega1, L.omega2)
    tau = b / a
    # user basis in reduced normalised coordinates
    user = []
    for v in (L.omega1, L.omega2):
        x, y = _coords(v / a, tau)
        user.append((int(round(x)), int(round(y))))
    cell_radius = max(abs(1 + tau), abs(1 - tau)) / 2
    r0 = max(4 * cell_radius, 3.0)
    pts = _sort_points(_enumerate(tau, 0j, r0))
    cell_points = pts[(np.abs(pts) > 0)]
    tail = np.zeros(_TAIL_KMAX + 1, dtype=complex)
    r2 = 6 * r0
    far = _enumerate(tau, 0j, r2)
    far = far[np.abs(far) > r0]
    for k in range(4, _TAIL_KMAX + 1, 2):
        if k <= _QSERIES_KMAX:
            tail[k] = eisenstein_g(k, tau) - _csum(cell_points ** (-k))
        else:
            tail[k] = _csum(far ** (-k))
    partial = _Tables(a, tau, tuple(user), cell_points, tail, (0j, 0j), None, None)
    half = np.array([0.5, tau / 2])
    _, drest, _ = _cell_raw(partial, half)
    eta = tuple(complex(2 * (1 / h + d)) for h, d in zip(half, drest))
    tab = _Tables(a, tau, tuple(user), cell_points, tail, eta, None, None)
    _self_check(tab)

    c_norm = complex(L.offset) / a
    cr, _, _ = _reduce(tau, c_norm)
    cr = complex(cr)
    if abs(cr) <= 16 * _EPS * max(1.0, abs(c_norm)):
        return tab
    c = cr * a
    sig = _sigma_basis(tab, np.asarray(-c))
    zeta_c, wp_c = _zeta_wp_basis(tab, np.asarray(c))
    consts = (c, sig, complex(zeta_c), complex(wp_c))
    return _Tables(a, tau, tuple(user), cell_points, tail, eta, cr, consts)


def _self_check(tab: _Tables) -> None:
    """Compare the cell evaluator against quasi-periodicity across one period."""
    p = np.asarray(0.3 + 0.2 * tab.tau)
    lhs = _cell_sigma(tab, p).log_modulus
    rhs = _cell_sigma(tab, p - 1).log_modulus + (tab.eta[0] * (p - 0.5)).real
    if not abs(lhs - rhs) <= 1e-6:
        raise NumericalFailure(f"cell evaluator failed quasi-periodicity self-check ({abs(lhs - rhs):.3g})")


def _sigma_basis(tab: _Tables, z) -> ScaledValue:
    """Weierstrass sigma of the lattice spanned by the basis (offset ignored)."""
    z = np.asarray(z, dtype=complex)
    zn = z / tab.w1
    zr, m, n = _reduce(tab.tau, zn)
    snap = np.abs(zr) <= 4 * _EPS * np.maximum(1.0, np.abs(zn))
    zr = np.where(snap, 0j, zr)
    cell = _cell_sigma(tab, zr)
    eta_w = m * tab.eta[0] + n * tab.eta[1]
    q = eta_w * (zr + (m + n * tab.tau) / 2)
    mi, ni = m.astype(np.int64), n.astype(np.int64)
    psi = np.where(((mi + ni + mi * ni) % 2) == 0, 1.0, -1.0)
    ph = psi * np.exp(1j * q.imag)
    w1 = tab.w1
    raw = cell.unit * ph * (w1 / abs(w1))
    draw = (cell.deriv + eta_w * cell.unit) * ph / abs(w1)
    return normalize(cell.log_scale + q.real + math.log(abs(w1)), raw, draw)


def _zeta_wp_basis(tab: _Tables, z):
    z = np.asarray(z, dtype=complex)
    zn = z / tab.w1
    zr, m, n = _reduce(tab.tau, zn)
    _, drest, wp_rest = _cell_raw(tab, zr)
    with np.errstate(divide="ignore", invalid="ignore"):
        zeta = 1 / zr + drest + m * tab.eta[0] + n * tab.eta[1]
        wp = 1 / zr**2 + wp_rest
    return zeta / tab.w1, wp / tab.w1**2


# --------------------------------------------------------------------------
# public operations


def quasi_periods(L: Lattice) -> tuple[complex, complex]:
    """``(eta1, eta2)`` for the basis ``(omega1, omega2)`` of ``L``.

    Defined by ``sigma(z + omega_i) = -exp(eta_i (z + omega_i/2)) sigma(z)``; the
    Legendre relation ``eta1 omega2 - eta2 omega1 = 2 pi i`` is checked.
    """
    tab = _tables(L)
    etas = []
    for a, b in tab.user_coords:
        etas.append((a * tab.eta[0] + b * tab.eta[1]) / tab.w1)
    eta1, eta2 = etas
    if legendre_residual(L, eta1, eta2) > LEGENDRE_TOL:
        raise NumericalFailure("Legendre relation violated")
    return eta1, eta2


def legendre_residual(L: Lattice, eta1: complex, eta2: complex) -> float:
    return abs(eta1 * L.omega2 - eta2 * L.omega1 - 2j * np.pi)


def weierstrass_zeta_wp(L: Lattice, z):
    """Weierstrass zeta and wp of the lattice spanned by ``L``'s basis."""
    return _zeta_wp_basis(_tables(L), z)


def eval_sigma_reduced(L: Lattice, z) -> ScaledValue:
    """Canonical product over ``L`` through cell reduction and quasi-periodicity.

    For a translated lattice ``Lambda + c`` (``c`` not a lattice point) the
    product equals ``sigma(z - c) / sigma(-c) * exp(zeta(c) z + wp(c) z^2 / 2)``:
    both sides are entire with the same simple zeros, equal 1 at the origin,
    and have vanishing first and second logarithmic derivatives there.
    """
    tab = _tables(L)
    z = np.asarray(z, dtype=complex)
    if tab.offset_norm is None:
        return _sigma_basis(tab, z)
    c, sig_c, zeta_c, wp_c = tab.offset_consts
    shifted = divide_const(_sigma_basis(tab, z - c), sig_c)
    expo = scaled_exp(zeta_c * z + wp_c * z * z / 2, zeta_c + wp_c * z)
    return multiply(shifted, expo)


def _row_tail_bound(y: float, x: float, r: float) -> float:
    """Bound on |log| of one row product at height ``y > x`` (normalised units)."""
    total = 0.0
    for q in range(1, 60):
        poly = 1 + 2 * math.pi * q * r + 2 * math.pi**2 * q * q * r * r
        term = (math.exp(-2 * math.pi * q * (y - x)) + math.exp(-2 * math.pi * q * y) * poly) / q
        total += term
        if term < 1e-30:
            break
    return total


def eval_canonical_product(L: Lattice, z, policy: TruncationPolicy | None = None) -> ScaledValue:
    """Direct evaluation of ``prod_w E2(z/w)`` row by row.

    Row ``{n + b}`` contributes ``sin(pi (b - z))/sin(pi b) * exp(z pi cot(pi b)
    + z^2 pi^2 / (2 sin^2(pi b)))``; the row through the origin contributes
    ``sin(pi z)/pi * exp(pi^2 z^2 / 6)``.  Rows are added outward until the
    summed tail bound for the omitted rows is below the policy target.
    """
    policy = policy or TruncationPolicy()
    tab = _tables(L)
    z = np.asarray(z, dtype=complex)
    zn = z / tab.w1
    tau = tab.tau
    shift = 0j if tab.offset_norm is None else tab.offset_norm
    x = float(np.max(np.abs(zn.imag))) if zn.size else 0.0
    r = float(np.max(np.abs(zn))) if zn.size else 0.0
    budget = policy.target_abs_err / policy.safety
    ratio = math.exp(-2 * math.pi * tau.imag)
    min_height = policy.min_radius / abs(tab.w1)

    def height(m):
        return (m * tau + shift).imag

    def needed(m, step):
        h = abs(height(m))
        if h <= x + 1.0 or h <= min_height:
            return True
        # m is the first omitted row on this side; bound all rows from m outward
        return _row_tail_bound(h, x, r) / (1 - ratio) > budget / 2

    m_hi = 0
    while needed(m_hi + 1, 1):
        m_hi += 1
    m_lo = 0
    while needed(m_lo - 1, -1):
        m_lo -= 1

    result = None
    for m in range(m_lo, m_hi + 1):
        b = m * tau + shift
        if tab.offset_norm is None and m == 0:
            sw = scaled_sin(np.pi * zn)
            e0 = np.pi**2 * zn * zn / 6
            de0 = np.pi**2 * zn / 3
            ph = np.exp(1j * e0.imag)
            row = normalize(
                sw.log_scale - math.log(math.pi) + e0.real,
                sw.unit * ph,
                (np.pi * sw.deriv + sw.unit * de0) * ph,
            )
        else:
            sb = scaled_sin(np.asarray(np.pi * b))
            cot = complex(sb.deriv / sb.unit)
            inv_sin2 = complex(np.exp(-2 * sb.log_scale) / sb.unit**2)
            e = zn * np.pi * cot + zn * zn * np.pi**2 * inv_sin2 / 2
            de = np.pi * cot + zn * np.pi**2 * inv_sin2
            sw = scaled_sin(np.pi * (b - zn))
            ph = np.exp(1j * e.imag) * np.conj(complex(sb.unit))
            row = normalize(
                sw.log_scale - float(sb.log_scale) + e.real,
                sw.unit * ph,
                (-np.pi * sw.deriv + sw.unit * de) * ph,
            )
        result = row if result is None else multiply(result, row)

    w1 = tab.w1
    if tab.offset_norm is None:
        return normalize(
            result.log_scale + math.log(abs(w1)),
            result.unit * (w1 / abs(w1)),
            result.deriv / abs(w1),
        )
    return ScaledValue(result.log_scale, result.unit, result.deriv / w1)
