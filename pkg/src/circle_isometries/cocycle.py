"""Derivative cocycles over the group of circle diffeomorphisms.

Three kinds, each satisfying ``c(g1 o g2) = c(g2) + c(g1) o g2 * J(g2)``:

* ``log``:         ``log Df``,                 ``J = 1``
* ``affine``:      ``D2f / Df``,               ``J = Dg2``
* ``projective``:  ``W_f / dist(fx, fy)^(2/p) - 1 / dist(x, y)^(2/p)``
  with ``W_f = (Df(x) Df(y))^(1/p)`` and ``J = (Dg2(x) Dg2(y))^(1/p)``.

For p = 2 the projective cocycle is ``sqrt(Df(x) Df(y)) / dist(fx, fy) -
1 / dist(x, y)``.  For p = 1 its diagonal limit is one sixth of the circle
Schwarzian (see :func:`circle_schwarzian`).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .circle import Diffeo, compose, orbit_states
from .crossratio import dist


@dataclass(frozen=True)
class CocycleKind:
    name: str
    p: float = 2.0

    def __post_init__(self):
        if self.name not in ("log", "affine", "projective"):
            raise ValueError(f"unknown cocycle kind {self.name!r}")
        if self.name == "projective" and not self.p >= 1:
            raise ValueError("projective cocycle needs p >= 1")

    @property
    def arity(self):
        return 2 if self.name == "projective" else 1

    def __str__(self):
        return f"projective({self.p:g})" if self.name == "projective" else self.name


LOG = CocycleKind("log")
AFFINE = CocycleKind("affine")


def projective(p: float = 2.0) -> CocycleKind:
    if p == 1:
        warnings.warn(
            "p = 1: integrability of the projective cocycle is not guaranteed "
            "for general C^2 maps",
            stacklevel=2,
        )
    return CocycleKind("projective", float(p))


def projective_from_data(Fx, Dx, Fy, Dy, x, y, p=2.0, metric=dist):
    """Projective cocycle from image points and derivatives (broadcasting)."""
    e = 2.0 / p
    with np.errstate(divide="ignore", invalid="ignore"):
        return (Dx * Dy) ** (1.0 / p) / metric(Fx, Fy) ** e - 1.0 / metric(x, y) ** e


def log_cocycle(f: Diffeo, x):
    return np.log(f.jet(x, 1)[1])


def affine_cocycle(f: Diffeo, x):
    _, d1, d2 = f.jet(x, 2)
    return d2 / d1


def projective_cocycle(f: Diffeo, x, y, p=2.0, metric=dist):
    x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    if np.any(metric(x, y) == 0):
        raise ValueError("projective cocycle is undefined on the diagonal; use schwarzian")
    Fx, Dx = f.jet(x, 1)
    Fy, Dy = f.jet(y, 1)
    return projective_from_data(Fx, Dx, Fy, Dy, x, y, p, metric)


def cocycle(kind: CocycleKind, f: Diffeo):
    """Pointwise evaluator ``x -> c_f(x)`` (or ``(x, y) -> c_f(x, y)``)."""
    if kind.name == "log":
        return lambda x: log_cocycle(f, x)
    if kind.name == "affine":
        return lambda x: affine_cocycle(f, x)
    return lambda x, y: projective_cocycle(f, x, y, kind.p)


def cocycle_of_iterate(kind: CocycleKind, f: Diffeo, n: int):
    """Evaluator for the cocycle of ``f^n`` built from one orbit pass per point."""
    n = int(n)

    def one(x):
        _, logD, aff = orbit_states(f, x, [n])[n]
        return logD if kind.name == "log" else aff

    def two(x, y):
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        if np.any(dist(x, y) == 0):
            raise ValueError("projective cocycle is undefined on the diagonal")
        Fx, lx, _ = orbit_states(f, x, [n])[n]
        Fy, ly, _ = orbit_states(f, y, [n])[n]
        return projective_from_data(Fx, np.exp(lx), Fy, np.exp(ly), x, y, kind.p)

    return two if kind.name == "projective" else one


def verify_chain_rule(kind: CocycleKind, g1: Diffeo, g2: Diffeo, samples=1000, seed=0):
    """Largest chain-rule residual for ``g1 o g2`` over random sample points.

    The residual is scaled by ``max(1, largest term)``, where the terms include
    the ``1/dist`` singular parts for the projective kind, so it measures
    rounding relative to the magnitudes being cancelled.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    g = compose(g1, g2)
    x = rng.random(samples)
    if kind.name == "projective":
        y = rng.random(samples)
        lhs = projective_cocycle(g, x, y, kind.p)
        F2x, D2x = g2.jet(x, 1)
        F2y, D2y = g2.jet(y, 1)
        inner = projective_cocycle(g2, x, y, kind.p)
        outer = projective_cocycle(g1, F2x, F2y, kind.p) * (D2x * D2y) ** (1.0 / kind.p)
        singular = 1.0 / dist(x, y) ** (2.0 / kind.p)
        terms = [lhs, inner, outer, singular]
    else:
        c = cocycle(kind, g1)
        F2, D2 = g2.jet(x, 1)
        J = 1.0 if kind.name == "log" else D2
        lhs = cocycle(kind, g)(x)
        inner = cocycle(kind, g2)(x)
        outer = c(F2) * J
        terms = [lhs, inner, outer]
    scale = max(1.0, max(float(np.max(np.abs(t))) for t in terms))
    return float(np.max(np.abs(lhs - (inner + outer)))) / scale


def schwarzian(f: Diffeo, x):
    """``D3f/Df - 3/2 (D2f/Df)^2``."""
    _, d1, d2, d3 = f.jet(x, 3)
    return d3 / d1 - 1.5 * (d2 / d1) ** 2


def circle_schwarzian(f: Diffeo, x):
    """Schwarzian adapted to the chordal metric: ``Sf + 2 pi^2 (Df^2 - 1)``.

    This is what the p = 1 projective cocycle converges to (times 1/6) on the
    diagonal; it vanishes on rotations and obeys the same chain rule as ``Sf``.
    """
    d1 = f.jet(x, 1)[1]
    return schwarzian(f, x) + 2.0 * np.pi**2 * (d1**2 - 1.0)
