"""Affine isometries of function spaces induced by circle diffeomorphisms,
with the finite-dimensional and l2 examples that frame them."""

from .circle import (
    ConvergenceError,
    Diffeo,
    Rotation,
    SineShear,
    compose,
    conj,
    continued_fraction,
    inverse,
    power,
    rotation_number,
)
from .funcspace import C0, L1, L2PAIR, lp_pair
from .isometry import AffineIsometry, apply_power

__all__ = [
    "AffineIsometry",
    "C0",
    "ConvergenceError",
    "Diffeo",
    "L1",
    "L2PAIR",
    "Rotation",
    "SineShear",
    "apply_power",
    "compose",
    "conj",
    "continued_fraction",
    "inverse",
    "lp_pair",
    "power",
    "rotation_number",
]

__version__ = "0.1.0"
