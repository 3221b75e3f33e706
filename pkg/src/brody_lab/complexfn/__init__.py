"""Log-domain evaluation of entire-function building blocks."""

from .elementary import Quadratic, eval_e2_factor, eval_exp_poly, log_e2
from .lattice import (
    Lattice,
    TruncationPolicy,
    eisenstein_g,
    eval_canonical_product,
    eval_sigma_reduced,
    legendre_residual,
    quasi_periods,
    weierstrass_zeta_wp,
)
from .scaled import ScaledValue

__all__ = [
    "Lattice",
    "Quadratic",
    "ScaledValue",
    "TruncationPolicy",
    "eisenstein_g",
    "eval_canonical_product",
    "eval_e2_factor",
    "eval_exp_poly",
    "eval_sigma_reduced",
    "legendre_residual",
    "log_e2",
    "quasi_periods",
    "weierstrass_zeta_wp",
]
