"""Exponentials of polynomials and the genus-2 primary factor."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scaled import ScaledValue

# |w| below this uses the power series of log E2; above it log(1-w) is well conditioned
_SERIES_CUTOFF = 0.25
_SERIES_TERMS = 30  # 0.25**30 / 30 < 1e-19


@dataclass(frozen=True)
class Quadratic:
    """``P(z) = a0 + a1 z + a2 z^2``."""

    a0: complex = 0j
    a1: complex = 0j
    a2: complex = 0j

    def __post_init__(self):
        for c in (self.a0, self.a1, self.a2):
            if not np.isfinite(complex(c)):
                raise ValueError("Quadratic coefficients must be finite")

    @property
    def coeffs(self) -> tuple[complex, complex, complex]:
        return (complex(self.a0), complex(self.a1), complex(self.a2))

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return self.a0 + z * (self.a1 + z * self.a2)

    def derivative(self, z):
        z = np.asarray(z, dtype=complex)
        return self.a1 + 2 * self.a2 * z


def eval_exp_poly(P: Quadratic, z) -> ScaledValue:
    """``exp(P(z))``: log_scale = Re P(z) exactly, unit = exp(i Im P(z))."""
    p = P(z)
    unit = np.exp(1j * p.imag)
    return ScaledValue(np.asarray(p.real, dtype=float), unit, unit * P.derivative(z))


def eval_e2_factor(w):
    """Log-modulus and log-derivative of ``E2(w) = (1 - w) exp(w + w^2/2)``.

    Returns ``(log_mod, dlog)`` where ``dlog = d/dw log E2(w) = -w^2 / (1 - w)``.
    For the factor ``E2(z/omega)`` the log-derivative in ``z`` is ``dlog / omega``,
    i.e. ``1/(z - omega) + 1/omega + z/omega^2``.  ``log_mod`` is ``-inf`` at ``w = 1``.
    """
    w = np.asarray(w, dtype=complex)
    return log_e2(w).real, _dlog_e2(w)


def log_e2(w) -> np.ndarray:
    """Complex ``log E2(w)`` (branch arbitrary in the imaginary part)."""
    w = np.asarray(w, dtype=complex)
    small = np.abs(w) < _SERIES_CUTOFF
    ws = np.where(small, w, 0)
    series = np.zeros_like(w)
    power = ws**3
    for k in range(3, _SERIES_TERMS + 3):
        series -= power / k
        power = power * ws
    wl = np.where(small, 0.5, w)  # dummy value avoids log(0) warnings
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = np.log(1 - wl) + wl + wl * wl / 2
    direct = np.where(wl == 1, complex(-np.inf, 0), direct)
    return np.where(small, series, direct)


def _dlog_e2(w):
    with np.errstate(divide="ignore", invalid="ignore"):
        return -(w * w) / (1 - w)
