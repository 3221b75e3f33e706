"""Scaled (log-domain) carriers for entire-function values.

A value ``f`` and its derivative ``f'`` are stored as ``f = unit * exp(log_scale)``
and ``f' = deriv * exp(log_scale)``.  When ``f != 0`` the scale is ``log|f|`` so
``|unit| == 1``; at a zero ``unit == 0`` and the scale is ``log|f'|`` so that the
derivative stays finite.  All fields are numpy arrays (0-d for scalar input).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InputError

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class ScaledValue:
    log_scale: np.ndarray
    unit: np.ndarray
    deriv: np.ndarray

    @property
    def log_modulus(self) -> np.ndarray:
        """``log|f|``; ``-inf`` at zeros."""
        with np.errstate(divide="ignore"):
            return self.log_scale + np.log(np.abs(self.unit))

    def value(self) -> np.ndarray:
        """``f`` itself (overflows for large scales)."""
        return self.unit * np.exp(self.log_scale)

    def derivative(self) -> np.ndarray:
        return self.deriv * np.exp(self.log_scale)

    def log_derivative(self) -> np.ndarray:
        """``f'/f``.  Raises at exact zeros, where the log-derivative has a pole."""
        unit = np.asarray(self.unit)
        if np.any(unit == 0):
            raise InputError("log-derivative requested at a zero of the function")
        return self.deriv / unit

    def __getitem__(self, idx) -> "ScaledValue":
        return ScaledValue(self.log_scale[idx], self.unit[idx], self.deriv[idx])


def normalize(log_scale, raw, draw) -> ScaledValue:
    """Fold ``|raw|`` into the scale so that ``|unit|`` is 1 (or ``unit`` is 0)."""
    log_scale = np.asarray(log_scale, dtype=float)
    raw = np.asarray(raw, dtype=complex)
    draw = np.asarray(draw, dtype=complex)
    log_scale, raw, draw = np.broadcast_arrays(log_scale, raw, draw)
    mag = np.abs(raw)
    dmag = np.abs(draw)
    nonzero = mag > 0
    ref = np.where(nonzero, mag, np.where(dmag > 0, dmag, 1.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        s = log_scale + np.log(ref)
        unit = np.where(nonzero, raw / ref, 0.0 + 0.0j)
        deriv = draw / ref
    return ScaledValue(s, unit, deriv)


def scaled_exp(q, dq) -> ScaledValue:
    """``exp(q)`` with derivative ``dq * exp(q)``."""
    q = np.asarray(q, dtype=complex)
    unit = np.exp(1j * q.imag)
    return ScaledValue(np.asarray(q.real, dtype=float), unit, unit * np.asarray(dq, dtype=complex))


def scaled_const(c) -> ScaledValue:
    c = np.asarray(c, dtype=complex)
    return normalize(np.zeros(c.shape), c, np.zeros(c.shape, dtype=complex))


def multiply(a: ScaledValue, b: ScaledValue) -> ScaledValue:
    """Product rule in scaled form."""
    raw = a.unit * b.unit
    draw = a.deriv * b.unit + a.unit * b.deriv
    return normalize(a.log_scale + b.log_scale, raw, draw)


def divide_const(a: ScaledValue, c: ScaledValue) -> ScaledValue:
    """``a / c`` for a nonvanishing constant ``c``."""
    if np.any(np.asarray(c.unit) == 0):
        raise InputError("division by a vanishing constant")
    inv = np.conj(c.unit)
    return ScaledValue(a.log_scale - c.log_scale, a.unit * inv, a.deriv * inv)


def linear_combination(coeffs, values) -> ScaledValue:
    """``sum_i c_i f_i`` with a shared exponent (the largest finite scale)."""
    scales = np.stack([np.asarray(v.log_scale, dtype=float) for v in values])
    top = np.max(scales, axis=0)
    top = np.where(np.isfinite(top), top, 0.0)
    raw = 0.0
    draw = 0.0
    for c, v in zip(coeffs, values):
        w = np.exp(v.log_scale - top)
        raw = raw + c * v.unit * w
        draw = draw + c * v.deriv * w
    return normalize(top, raw, draw)


def scaled_sin(w) -> ScaledValue:
    """``sin(w)`` with derivative ``cos(w)``, overflow-free for large ``|Im w|``.

    Points within a few ulps of ``k*pi`` are snapped to exact zeros.
    """
    w = np.asarray(w, dtype=complex)
    x, y = w.real, w.imag
    k = np.round(x / np.pi)
    near_zero = np.abs(w - k * np.pi) <= 8 * _EPS * np.maximum(1.0, np.abs(w))
    small = np.abs(y) <= 1.0
    # |Im w| > 1: factor out the dominant exponential
    sgn = np.where(y > 0, 1.0, -1.0)
    e2 = np.exp(2j * sgn * np.where(small, 0.0, w))  # |e2| < e^-2
    ph = np.exp(-1j * sgn * x)
    big_raw = 1j * sgn * ph * (1 - e2)
    big_draw = ph * (1 + e2)
    big_scale = np.abs(y) - np.log(2.0)
    raw = np.where(small, np.sin(np.where(small, w, 0)), big_raw)
    draw = np.where(small, np.cos(np.where(small, w, 0)), big_draw)
    scale = np.where(small, 0.0, big_scale)
    parity = np.where(np.mod(k, 2) == 0, 1.0, -1.0)
    raw = np.where(near_zero, 0.0, raw)
    draw = np.where(near_zero, parity, draw)
    scale = np.where(near_zero, 0.0, scale)
    return normalize(scale, raw, draw)
