"""Holomorphic curves C -> P^n given by entire components.

Components are evaluated in scaled form (see :mod:`brody_lab.complexfn.scaled`),
so ``u = log||f||`` and the spherical derivative never overflow for the
quadratic-growth curves this package deals with.

Spherical derivative convention: the Wronskian sum runs over unordered pairs,

    ||f'||^2 = sum_{i<j} |f_i' f_j - f_i f_j'|^2 / ||f||^4,

which makes ``(1/2pi) Laplacian(u) = (1/pi) ||f'||^2`` hold exactly and gives
``|g'|/(1+|g|^2)`` for the curve ``(1, g)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .complexfn import Lattice, ScaledValue, eval_sigma_reduced
from .complexfn.scaled import linear_combination, multiply, normalize, scaled_const, scaled_exp
from .errors import InputError


def _pair(v) -> list[float]:
    v = complex(v)
    return [v.real, v.imag]


def _parse_complex(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    raise InputError(f"expected a [re, im] pair, got {v!r}")


_COMMON_ZERO_LOG = math.log(1e-11)

# --------------------------------------------------------------------------
# components


class Component:
    """An entire function evaluable in scaled form."""

    def evaluate(self, z) -> ScaledValue:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError

    def __call__(self, z) -> ScaledValue:
        return self.evaluate(z)

    def zeros(self, radius: float) -> np.ndarray | None:
        """Zeros in ``|z| <= radius`` when they are known in closed form, else ``None``."""
        return None


@dataclass(frozen=True)
class ExpPoly(Component):
    """``exp(P(z))`` with ``P`` given by ascending coefficients."""

    coeffs: tuple = (0j,)

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs) or (0j,))

    def evaluate(self, z):
        z = np.asarray(z, dtype=complex)
        p = np.zeros_like(z)
        dp = np.zeros_like(z)
        for c in reversed(self.coeffs):
            dp = dp * z + p
            p = p * z + c
        return scaled_exp(p, dp)

    def zeros(self, radius):
        return np.empty(0, dtype=complex)

    def to_json(self):
        return {"type": "exp_poly", "coeffs": [_pair(c) for c in self.coeffs]}


@dataclass(frozen=True)
class ExpSum(Component):
    """``sum_k c_k exp(lambda_k z)``; ``terms`` holds ``(c_k, lambda_k)`` pairs."""

    terms: tuple = ()

    def __post_init__(self):
        terms = tuple((complex(c), complex(lam)) for c, lam in self.terms)
        if not terms or all(c == 0 for c, _ in terms):
            raise InputError("exp_sum needs at least one nonzero term")
        object.__setattr__(self, "terms", terms)

    def evaluate(self, z):
        z = np.asarray(z, dtype=complex)
        parts = [scaled_exp(lam * z, np.full(z.shape, lam)) for _, lam in self.terms]
        return linear_combination([c for c, _ in self.terms], parts)

    def zeros(self, radius):
        live = [(c, lam) for c, lam in self.terms if c != 0]
        if len(live) == 1:
            return np.empty(0, dtype=complex)
        if len(live) != 2 or live[0][1] == live[1][1]:
            return None
        (c1, l1), (c2, l2) = live
        # e^{(l1 - l2) z} = -c2/c1
        d = l1 - l2
        base = complex(np.log(-c2 / c1))
        kmax = int(radius * abs(d) / (2 * math.pi)) + 2
        z = (base + 2j * math.pi * np.arange(-kmax, kmax + 1)) / d
        return z[np.abs(z) <= radius]

    def to_json(self):
        return {"type": "exp_sum", "terms": [{"c": _pair(c), "lambda": _pair(lam)} for c, lam in self.terms]}


@dataclass(frozen=True)
class CanonicalProduct(Component):
    """Genus-2 Weierstrass product with simple zeros on a (translated) lattice."""

    lattice: Lattice = field(default_factory=Lattice.square)

    def evaluate(self, z):
        return eval_sigma_reduced(self.lattice, z)

    def zeros(self, radius):
        return self.lattice.points(radius)

    def to_json(self):
        L = self.lattice
        return {
            "type": "canonical_product",
            "lattice": {"omega1": _pair(L.omega1), "omega2": _pair(L.omega2), "offset": _pair(L.offset)},
        }


@dataclass(frozen=True)
class Constant(Component):
    value: complex = 1 + 0j

    def __post_init__(self):
        object.__setattr__(self, "value", complex(self.value))
        if self.value == 0:
            raise InputError("a constant component must be nonzero")

    def evaluate(self, z):
        z = np.asarray(z, dtype=complex)
        return scaled_const(np.full(z.shape, self.value))

    def zeros(self, radius):
        return np.empty(0, dtype=complex)

    def to_json(self):
        return {"type": "constant", "value": _pair(self.value)}


@dataclass(frozen=True)
class Polynomial(Component):
    """A polynomial with ascending coefficients."""

    coeffs: tuple = (0j, 1 + 0j)

    def __post_init__(self):
        coeffs = tuple(complex(c) for c in self.coeffs)
        if not any(coeffs):
            raise InputError("polynomial component must not vanish identically")
        object.__setattr__(self, "coeffs", coeffs)

    def evaluate(self, z):
        z = np.asarray(z, dtype=complex)
        p = np.zeros_like(z)
        dp = np.zeros_like(z)
        for c in reversed(self.coeffs):
            dp = dp * z + p
            p = p * z + c
        return normalize(np.zeros(z.shape), p, dp)

    def zeros(self, radius):
        c = np.trim_zeros(np.array(self.coeffs), "b")
        roots = np.roots(c[::-1]) if len(c) > 1 else np.empty(0, dtype=complex)
        return roots[np.abs(roots) <= radius].astype(complex)

    def to_json(self):
        return {"type": "polynomial", "coeffs": [_pair(c) for c in self.coeffs]}


@dataclass(frozen=True)
class Scaled(Component):
    """``base(z) * exp(Q(z))``; JSON form carries only the linear coefficient."""

    base: Component
    exp_coeffs: tuple = (0j, 0j)

    def __post_init__(self):
        object.__setattr__(self, "exp_coeffs", tuple(complex(c) for c in self.exp_coeffs))

    def evaluate(self, z):
        return multiply(self.base.evaluate(z), ExpPoly(self.exp_coeffs).evaluate(z))

    def zeros(self, radius):
        return self.base.zeros(radius)

    def to_json(self):
        c = self.exp_coeffs
        if len(c) > 2 and any(x != 0 for x in c[2:]) or (c and c[0] != 0):
            raise InputError("only e^{beta z} factors are representable in the curve file format")
        beta = c[1] if len(c) > 1 else 0j
        return {"type": "scaled", "base": self.base.to_json(), "exp_linear": _pair(beta)}


@dataclass(frozen=True)
class LinearCombination(Component):
    """``sum_i a_i f_i`` of other components (produced by coordinate shears)."""

    terms: tuple = ()

    def evaluate(self, z):
        return linear_combination([a for a, _ in self.terms], [f.evaluate(z) for _, f in self.terms])

    def to_json(self):
        return {"type": "sum", "terms": [{"c": _pair(a), "component": f.to_json()} for a, f in self.terms]}


def component_from_json(d: dict) -> Component:
    if not isinstance(d, dict):
        raise InputError(f"component must be an object, got {d!r}")
    try:
        kind = d["type"]
        if kind == "exp_poly":
            return ExpPoly(tuple(_parse_complex(c) for c in d["coeffs"]))
        if kind == "exp_sum":
            return ExpSum(tuple((_parse_complex(t["c"]), _parse_complex(t["lambda"])) for t in d["terms"]))
        if kind == "canonical_product":
            lat = d["lattice"]
            return CanonicalProduct(
                Lattice(
                    _parse_complex(lat["omega1"]),
                    _parse_complex(lat["omega2"]),
                    _parse_complex(lat.get("offset", [0, 0])),
                )
            )
        if kind == "polynomial":
            return Polynomial(tuple(_parse_complex(c) for c in d["coeffs"]))
        if kind == "constant":
            return Constant(_parse_complex(d["value"]))
        if kind == "scaled":
            return Scaled(component_from_json(d["base"]), (0j, _parse_complex(d["exp_linear"])))
        if kind == "sum":
            return LinearCombination(
                tuple((_parse_complex(t["c"]), component_from_json(t["component"])) for t in d["terms"])
            )
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed component {d!r}: {exc}") from exc
    raise InputError(f"unknown component type {d.get('type')!r}")


# --------------------------------------------------------------------------
# curves


@dataclass(frozen=True)
class CurvePoint:
    z: complex
    u: float
    u_components: tuple
    spherical: float


@dataclass(frozen=True)
class HoloCurve:
    """``f = (f_0, ..., f_n)`` with ``n >= 1``."""

    components: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        if len(comps) < 2:
            raise InputError("a curve into P^n needs at least two components")
        object.__setattr__(self, "components", comps)

    @property
    def n(self) -> int:
        return len(self.components) - 1

    def evaluate(self, z) -> list[ScaledValue]:
        return [c.evaluate(z) for c in self.components]

    def log_moduli(self, z) -> np.ndarray:
        """``u_j = log|f_j|`` stacked along the first axis."""
        return np.stack([v.log_modulus for v in self.evaluate(z)])

    def point(self, z: complex) -> CurvePoint:
        z = complex(z)
        uj = self.log_moduli(z)
        return CurvePoint(z, float(norm_log(self, z)), tuple(float(x) for x in uj), float(spherical_derivative(self, z)))

    def check_no_common_zeros(self, samples: int = 10_000, seed: int = 0, radius: float = 10.0) -> None:
        """Reject curves whose components share a zero.

        Checked at the closed-form zeros of every component and at random
        points of ``|z| <= radius``; a check, not a proof.
        """
        rng = np.random.default_rng(seed)
        pts = [radius * np.sqrt(rng.uniform(size=samples)) * np.exp(2j * np.pi * rng.uniform(size=samples))]
        for comp in self.components:
            zs = comp.zeros(radius)
            if zs is not None:
                pts.append(np.asarray(zs, dtype=complex))
        z = np.concatenate(pts)
        tiny = np.stack([(v.unit == 0) | (v.log_modulus < _COMMON_ZERO_LOG) for v in self.evaluate(z)])
        if np.any(np.all(tiny, axis=0)):
            raise InputError("components have a common zero")

    def to_json(self) -> dict:
        return {"components": [c.to_json() for c in self.components]}

    @classmethod
    def from_json(cls, d: dict) -> "HoloCurve":
        if not isinstance(d, dict) or "components" not in d:
            raise InputError("curve spec must be an object with a 'components' list")
        return cls(tuple(component_from_json(c) for c in d["components"]))


def load_curve(path: str | Path) -> HoloCurve:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read curve spec {path}: {exc}") from exc
    curve = HoloCurve.from_json(data)
    curve.check_no_common_zeros(samples=2000)
    return curve


# --------------------------------------------------------------------------
# operations


def norm_log(curve: HoloCurve, z) -> np.ndarray:
    """``u = log sqrt(sum |f_j|^2)`` via a shared-exponent log-sum."""
    lm = curve.log_moduli(z)
    top = np.max(lm, axis=0)
    with np.errstate(divide="ignore"):
        return top + 0.5 * np.log(np.sum(np.exp(2 * (lm - top)), axis=0))


def _rescaled(curve: HoloCurve, z):
    vals = curve.evaluate(z)
    lm = np.stack([v.log_modulus for v in vals])
    s = np.max(lm, axis=0)
    v, dv = [], []
    for val in vals:
        w = np.exp(val.log_scale - s)
        v.append(val.unit * w)
        dv.append(val.deriv * w)
    return v, dv


def spherical_derivative_sq(curve: HoloCurve, z) -> np.ndarray:
    v, dv = _rescaled(curve, z)
    num = 0.0
    for i in range(len(v)):
        for j in range(i + 1, len(v)):
            num = num + np.abs(dv[i] * v[j] - v[i] * dv[j]) ** 2
    den = sum(np.abs(x) ** 2 for x in v)
    return num / den**2


def spherical_derivative(curve: HoloCurve, z) -> np.ndarray:
    """``||f'||(z)`` with the unordered-pair Wronskian sum."""
    return np.sqrt(spherical_derivative_sq(curve, z))


def evaluate_chunked(fn, z: np.ndarray, chunk: int = 40_000) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    flat = z.ravel()
    out = np.empty(flat.shape, dtype=float)
    for start in range(0, flat.size, chunk):
        out[start:start + chunk] = fn(flat[start:start + chunk])
    return out.reshape(z.shape)


@dataclass(frozen=True)
class SupEstimate:
    sup: float
    argmax: complex
    shell_edges: tuple
    shell_max: tuple

    @property
    def stability(self) -> float:
        """Relative spread ``(max - min) / max`` of the shell maxima."""
        hi = max(self.shell_max)
        return (hi - min(self.shell_max)) / hi if hi > 0 else 0.0


def polar_grid(r_in: float, r_out: float, resolution: float) -> np.ndarray:
    """Points of a polar grid on the annulus with spacing at most ``resolution``."""
    nr = max(2, int(math.ceil((r_out - r_in) / resolution)) + 1)
    pts = []
    for r in np.linspace(r_in, r_out, nr):
        if r == 0:
            pts.append(np.zeros(1, dtype=complex))
            continue
        nt = max(8, int(math.ceil(2 * math.pi * r / resolution)))
        pts.append(r * np.exp(2j * np.pi * (np.arange(nt) + 0.5 * (len(pts) % 2)) / nt))
    return np.concatenate(pts)


def _refine(curve: HoloCurve, z0: complex, r_in: float, r_out: float, step: float):
    def neg(p):
        z = complex(p[0], p[1])
        r = abs(z)
        if r < r_in or r > r_out:
            return 0.0
        return -float(spherical_derivative(curve, z))

    res = minimize(neg, [z0.real, z0.imag], method="Nelder-Mead",
                   options={"xatol": 1e-10, "fatol": 1e-14, "initial_simplex": _simplex(z0, step / 2)})
    z = complex(res.x[0], res.x[1])
    return -res.fun, z


def _simplex(z0: complex, h: float):
    return np.array([[z0.real, z0.imag], [z0.real + h, z0.imag], [z0.real, z0.imag + h]])


def sup_spherical(curve: HoloCurve, radius: float, resolution: float, shells: int = 3,
                  refine_top: int = 3, edges: Sequence[float] | None = None) -> SupEstimate:
    """Estimate ``sup ||f'||`` on ``|z| <= radius`` by a polar scan plus local refinement.

    The disc is split into ``shells`` annuli of equal width (or at the given
    ``edges``); the maximum of each is reported so stability across shells can
    be judged.
    """
    if not resolution > 0:
        raise InputError("resolution must be positive")
    if not radius > 0:
        raise InputError("radius must be positive")
    if edges is None:
        edges = np.linspace(0.0, radius, shells + 1)
    else:
        edges = np.asarray(edges, dtype=float)
        if edges[0] != 0 or np.any(np.diff(edges) <= 0) or edges[-1] > radius:
            raise InputError("shell edges must increase from 0 and stay within the radius")
        shells = len(edges) - 1
    best_val, best_z = -1.0, 0j
    shell_max = []
    for k in range(shells):
        r_in, r_out = edges[k], edges[k + 1]
        z = polar_grid(r_in, r_out, resolution)
        vals = evaluate_chunked(lambda w: spherical_derivative(curve, w), z)
        order = np.argsort(vals)[::-1]
        shell_best, shell_z = float(vals[order[0]]), complex(z[order[0]])
        seen = []
        for idx in order:
            if len(seen) >= refine_top:
                break
            zc = complex(z[idx])
            if any(abs(zc - s) < 4 * resolution for s in seen):
                continue
            seen.append(zc)
            v, zr = _refine(curve, zc, r_in, r_out, resolution)
            if v > shell_best:
                shell_best, shell_z = v, zr
        shell_max.append(shell_best)
        if shell_best > best_val:
            best_val, best_z = shell_best, shell_z
    return SupEstimate(best_val, best_z, tuple(float(e) for e in edges), tuple(shell_max))


def shear_coordinates(curve: HoloCurve, c: complex, check_points: int = 64, seed: int = 0) -> HoloCurve:
    """Replace ``f_0`` by ``f_0 + c f_1``; the other components are untouched."""
    c = complex(c)
    if c == 0:
        return curve
    f0, f1 = curve.components[0], curve.components[1]
    new0 = LinearCombination(((1.0 + 0j, f0), (c, f1)))
    rng = np.random.default_rng(seed)
    z = rng.normal(scale=3.0, size=check_points) + 1j * rng.normal(scale=3.0, size=check_points)
    v0 = new0.evaluate(z)
    if np.all(v0.unit == 0) or np.all(v0.log_modulus - np.maximum(f0(z).log_modulus, f1(z).log_modulus) < -30):
        raise InputError("shear makes the first component vanish identically")
    for other in curve.components[1:]:
        ratio_log = v0.log_modulus - other.evaluate(z).log_modulus
        phase = v0.unit * np.conj(other.evaluate(z).unit)
        if np.ptp(ratio_log) < 1e-9 and np.ptp(np.angle(phase)) < 1e-9:
            raise InputError("shear makes two components proportional")
    return HoloCurve((new0,) + curve.components[1:])


# --------------------------------------------------------------------------
# reference curves


def z_curve() -> HoloCurve:
    """``(z, 1)``."""
    return HoloCurve((Polynomial((0, 1)), Constant(1)))


def exp_curve() -> HoloCurve:
    """``(e^z, 1)``."""
    return HoloCurve((ExpPoly((0, 1)), Constant(1)))


def sin_curve() -> HoloCurve:
    """``(sin z, 1)``."""
    return HoloCurve((ExpSum(((-0.5j, 1j), (0.5j, -1j))), Constant(1)))


def expm1_curve() -> HoloCurve:
    """``(e^z - 1, 1)``."""
    return HoloCurve((ExpSum(((1, 1), (-1, 0))), Constant(1)))


def constant_curve(c: complex = 2.0, n: int = 1) -> HoloCurve:
    return HoloCurve((Constant(c),) + (Constant(1.0),) * n)
