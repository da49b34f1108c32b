"""Affine isometries ``I_f = Theta_f + c_f`` driven by circle diffeomorphisms.

Powers are never computed by iterating grid operators.  ``I^n(v)`` is
assembled from a single orbit pass per node,

    I^n(v) = Theta_{f^n}(v) + c_{f^n},

with ``f^n``, ``log Df^n`` and ``D2f^n / Df^n`` accumulated along the orbit.

Note on composition order: ``I_g(I_f(v)) = I_{f o g}(v)``, i.e. ``f -> I_f``
is a right action.  For commuting maps (all shipped families) the order is
immaterial.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from . import tables
from .circle import Diffeo, Rotation, conj, inverse, orbit_states
from .cocycle import AFFINE, LOG, CocycleKind, cocycle, projective_from_data
from .funcspace import (
    DEFAULT_N1,
    DEFAULT_N2,
    GridFunction,
    GridFunction1,
    GridFunction2,
    SpaceTag,
    grid_function,
    nodes1,
    nodes2,
    norm,
)


def kind_for(tag: SpaceTag) -> CocycleKind:
    if tag.name == "C0":
        return LOG
    if tag.name == "L1":
        return AFFINE
    return CocycleKind("projective", tag.p)


@dataclass(frozen=True)
class AffineIsometry:
    tag: SpaceTag
    f: Diffeo

    @property
    def kind(self) -> CocycleKind:
        return kind_for(self.tag)

    def __call__(self, v: GridFunction) -> GridFunction:
        return apply_power(self, 1, v)


def _assemble1(tag, v, F, logD, aff):
    out = v.evaluate(F)
    if tag.name == "L1":
        return out * np.exp(logD) + aff
    return out + logD


def _assemble2(tag, v, xs, ys, sx, sy):
    (Fx, lx, _), (Fy, ly, _) = sx, sy
    Dx, Dy = np.exp(lx)[:, None], np.exp(ly)[None, :]
    theta = v.evaluate(Fx, Fy) * (Dx * Dy) ** (1.0 / tag.p)
    c = projective_from_data(
        Fx[:, None], Dx, Fy[None, :], Dy, xs[:, None], ys[None, :], tag.p
    )
    return theta + c


def apply_power(I: AffineIsometry, n: int, v: GridFunction) -> GridFunction:
    """``I^n(v)`` for any integer n via closed-form cocycle accumulation."""
    n = int(n)
    if I.tag.arity != v.arity:
        raise ValueError(f"space {I.tag} needs arity {I.tag.arity}, got {v.arity}")
    if n == 0:
        return v
    tag, f = I.tag, I.f
    if v.arity == 1:

        def gen(x):
            x = np.asarray(x, dtype=float)
            F, logD, aff = orbit_states(f, x, [n])[n]
            return _assemble1(tag, v, F, logD, aff)

        if v.generator is not None:
            return GridFunction1(v.n, generator=gen)
        return GridFunction1(v.n, samples=gen(nodes1(v.n)))

    def gen2(xs, ys):
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        sx = orbit_states(f, xs, [n])[n]
        sy = orbit_states(f, ys, [n])[n]
        return _assemble2(tag, v, xs, ys, sx, sy)

    if v.generator is not None:
        return GridFunction2(v.n, generator=gen2)
    return GridFunction2(v.n, samples=gen2(*nodes2(v.n)))


def powers_on_grid(I: AffineIsometry, v: GridFunction, times):
    """Samples of ``I^t(v)`` for every t in ``times`` from one orbit walk."""
    times = [int(t) for t in times]
    if v.arity == 1:
        x = nodes1(v.n)
        states = orbit_states(I.f, x, times)
        return {
            t: (v.samples if t == 0 else _assemble1(I.tag, v, *states[t]))
            for t in times
        }
    xs, ys = nodes2(v.n)
    sx = orbit_states(I.f, xs, times)
    sy = orbit_states(I.f, ys, times)
    return {
        t: (v.samples if t == 0 else _assemble2(I.tag, v, xs, ys, sx[t], sy[t]))
        for t in times
    }


@dataclass
class RecurrenceReport:
    times: list
    residuals: list
    tag: SpaceTag

    def rows(self):
        return list(zip(self.times, self.residuals))

    def to_csv(self) -> str:
        return tables.csv_text(["time", "residual"], self.rows())

    def summary(self) -> dict:
        return {
            "tag": str(self.tag),
            "times": self.times,
            "residuals": self.residuals,
            "min_residual": min(self.residuals),
        }


def _vector_like(v: GridFunction, samples) -> GridFunction:
    return type(v)(v.n, samples=samples)


def recurrence_scan(I: AffineIsometry, v: GridFunction, times) -> RecurrenceReport:
    """Residuals ``||I^t(v) - v||`` along ``times``."""
    times = [int(t) for t in times]
    if not times:
        raise ValueError("times must be nonempty")
    grid = powers_on_grid(I, v, times)
    res = [norm(I.tag, _vector_like(v, grid[t] - v.samples)) for t in times]
    return RecurrenceReport(times, res, I.tag)


def drift_estimate(I: AffineIsometry, v: GridFunction, n_max: int, times=None):
    """List of ``(n, ||I^n(v)|| / n)``; all n up to ``n_max`` unless ``times``."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    times = list(range(1, n_max + 1)) if times is None else [int(t) for t in times]
    grid = powers_on_grid(I, v, times)
    return [(t, norm(I.tag, _vector_like(v, grid[t])) / t) for t in times]


# -- fixed points and conjugacies ---------------------------------------------


def fixed_point_from_conjugacy(tag: SpaceTag, h: Diffeo, n: int | None = None):
    """Fixed point of ``I_f`` for ``f = h o R o h^-1``.

    The fixed point is the cocycle of ``h^-1`` (the map straightening ``f``):
    ``log D(h^-1) = -log Dh o h^-1`` on C0 and ``D2(h^-1) / D(h^-1)`` on L1.
    Indeed ``I_f(c_k) = c_{k o f} = c_{R o k} = c_k`` for ``k = h^-1``.
    """
    k = inverse(h)
    c = cocycle(kind_for(tag), k)
    if tag.arity == 1:
        return grid_function(tag, n or DEFAULT_N1, c, name=f"fixed_point[{h.spec()}]")

    def gen2(xs, ys):
        return c(xs[:, None], ys[None, :])

    return grid_function(tag, n or DEFAULT_N2, gen2, name=f"fixed_point[{h.spec()}]")


class SampledLift:
    """Monotone degree-one lift known at the edges ``k / N``.

    ``H(x) - x`` is interpolated by a periodic cubic spline; the inverse uses
    the spline through the swapped data.
    """

    def __init__(self, edge_values):
        edge_values = np.asarray(edge_values, dtype=float)
        n = edge_values.size - 1
        if np.any(np.diff(edge_values) <= 0):
            raise ValueError("sampled lift is not strictly increasing")
        self.n = n
        x = np.arange(n + 1) / n
        self.values = edge_values
        self._disp = CubicSpline(x, edge_values - x, bc_type="periodic")
        self._inv_disp = CubicSpline(edge_values, x - edge_values, bc_type="periodic")
        self._base = edge_values[0]

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        frac = np.mod(x, 1.0)
        return x + self._disp(frac)

    def derivative(self, x):
        return 1.0 + self._disp(np.mod(np.asarray(x, dtype=float), 1.0), 1)

    def inverse(self, y):
        y = np.asarray(y, dtype=float)
        shifted = self._base + np.mod(y - self._base, 1.0)
        return y + self._inv_disp(shifted)


def conjugacy_from_fixed_point(tag: SpaceTag, fp: GridFunction1) -> SampledLift:
    """Straightening map from a fixed point, by cumulative midpoint quadrature.

    C0: ``H(x) = int_0^x exp(phi) / int_0^1 exp(phi)`` where ``phi`` solves
    ``I(phi) = phi``, i.e. ``phi o f = phi - log Df``.
    L1: ``H(x) = int_0^x exp(int_0^s psi) ds`` normalised likewise.
    Then ``H o f o H^-1`` is a rotation.
    """
    if tag.name not in ("C0", "L1"):
        raise ValueError("conjugacy recovery is defined on C0 and L1")
    s = fp.samples
    if not np.all(np.isfinite(s)):
        raise ValueError("fixed point has non-finite samples")
    n = s.size
    if tag.name == "C0":
        log_density = s
    else:
        # int_0^{x_j} psi at the midpoints x_j
        log_density = (np.cumsum(s) - 0.5 * s) / n
    density = np.exp(log_density - log_density.max())
    edges = np.concatenate([[0.0], np.cumsum(density)])
    return SampledLift(edges / edges[-1])


def conjugation_derivative(H: SampledLift, f: Diffeo, y, step=1e-5):
    """Centered finite difference of ``H o f o H^-1`` at ``y``."""
    y = np.asarray(y, dtype=float)

    def g(t):
        return H(f(H.inverse(t)))

    return (g(y + step) - g(y - step)) / (2 * step)


def commuting_family(h: Diffeo, rhos, tag: SpaceTag):
    """Isometries driven by ``h o R_rho o h^-1``, which commute pairwise."""
    rhos = [float(r) for r in rhos]
    if len(set(rhos)) != len(rhos):
        raise ValueError("rotation numbers must be distinct")
    return [AffineIsometry(tag, conj(h, Rotation(r))) for r in rhos]
