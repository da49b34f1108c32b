"""Cross-ratios of cyclically ordered circle points.

Distances are chordal, ``dist(x, y) = |sin(pi (x - y))| / pi``.  With this
metric the double integral of ``1 / dist^2`` over two disjoint arcs equals the
log of the cross-ratio exactly, and both agree with the difference formula to
second order on small arcs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circle import Diffeo, compose, Rotation, SineShear, walk

LOG2_SQRT = math.sqrt(math.log(2.0))

# Below this the image points are not resolved in double precision.
RESOLUTION_FLOOR = 1e-12


def dist(x, y):
    return np.abs(np.sin(np.pi * (np.asarray(x) - np.asarray(y)))) / np.pi


def _unwrap(a, b, c, d):
    """Lift to ``a <= b < c < d < a + 1``."""
    a = float(a) % 1.0
    b = a + (float(b) - a) % 1.0
    c = a + (float(c) - a) % 1.0
    d = a + (float(d) - a) % 1.0
    return a, b, c, d


def cyclically_ordered(a, b, c, d) -> bool:
    a, b, c, d = _unwrap(a, b, c, d)
    return a < b < c < d < a + 1.0


@dataclass(frozen=True)
class Quadruple:
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        if not cyclically_ordered(self.a, self.b, self.c, self.d):
            raise ValueError(f"points {self.points} are not cyclically ordered")

    @property
    def points(self):
        return (self.a, self.b, self.c, self.d)

    def rotated(self, t: float) -> "Quadruple":
        return Quadruple(*((p + t) % 1.0 for p in self.points))


def crossratio_points(a, b, c, d):
    """Vectorised cross-ratio ``dist(a,c) dist(b,d) / (dist(a,d) dist(b,c))``."""
    return dist(a, c) * dist(b, d) / (dist(a, d) * dist(b, c))


def crossratio(q: Quadruple) -> float:
    return float(crossratio_points(*q.points))


def normalize_d(a: float, b: float, c: float, target: float = 2.0) -> float:
    """The unique ``d`` in the arc ``(c, a)`` with ``[a, b, c, d] = target``.

    The cross-ratio increases from 1 (at ``c``) to infinity (at ``a``) along the
    arc, so plain bisection converges; it runs until the bracket stops
    shrinking, which is well inside 1e-12.
    """
    a, b, c, _ = _unwrap(a, b, c, c)
    if not (a < b < c < a + 1.0):
        raise ValueError("a, b, c must be distinct and cyclically ordered")
    lo, hi = c, a + 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if crossratio_points(a, b, c, mid) < target:
            lo = mid
        else:
            hi = mid
    d = 0.5 * (lo + hi)
    if not (c < d < a + 1.0) or not np.isfinite(crossratio_points(a, b, c, d)):
        raise ValueError("bisection bracket failed for the given triple")
    return d % 1.0


def crossratio_integral(q: Quadruple, n_quad: int = 64) -> float:
    """Tensor Gauss-Legendre value of the double integral of ``1/dist^2`` over
    ``[a, b] x [c, d]``."""
    a, b, c, d = _unwrap(*q.points)
    nodes, weights = np.polynomial.legendre.leggauss(n_quad)
    x = 0.5 * (b - a) * nodes + 0.5 * (a + b)
    y = 0.5 * (d - c) * nodes + 0.5 * (c + d)
    wx = 0.5 * (b - a) * weights
    wy = 0.5 * (d - c) * weights
    kernel = 1.0 / dist(x[:, None], y[None, :]) ** 2
    return float(wx @ kernel @ wy)


# -- dynamics -----------------------------------------------------------------


@dataclass
class BlowupScan:
    times: list
    values: np.ndarray
    resolved: np.ndarray

    @property
    def max_observed(self) -> float:
        vals = self.values[self.resolved]
        return float(vals.max()) if vals.size else float("nan")

    def first_exceeding(self, threshold: float):
        hits = np.nonzero(self.resolved & (self.values > threshold))[0]
        return self.times[hits[0]] if hits.size else None


def blowup_scan(f: Diffeo, q: Quadruple, n_list) -> BlowupScan:
    """Cross-ratios of the image quadruples ``f^n(q)`` for every n in ``n_list``.

    Entries whose image points come closer than ``RESOLUTION_FLOOR`` are kept
    but flagged unresolved.  Raises if an image quadruple loses cyclic order,
    which an orientation-preserving diffeo never does.
    """
    times = sorted(int(n) for n in n_list)
    pts = np.array(q.points)
    wanted = set(times)
    images = {}
    for k, pt, _, _, _ in walk(f, pts, max(times)):
        if k in wanted:
            images[k] = pt.copy()
    values, resolved = [], []
    for n in times:
        a, b, c, d = images[n]
        if not cyclically_ordered(a, b, c, d):
            raise ValueError(f"cyclic order lost at n={n}")
        gaps = dist(np.array([a, b, c, d]), np.array([b, c, d, a]))
        with np.errstate(divide="ignore"):
            values.append(float(crossratio_points(a, b, c, d)))
        resolved.append(bool(gaps.min() > RESOLUTION_FLOOR))
    return BlowupScan(times, np.array(values), np.array(resolved))


def rational_blowup_example(p: int, q: int, eps: float):
    """``f = R(p/q) o SineShear(eps, q)`` and a normalised quadruple that it
    pinches.

    ``f^q`` is ``SineShear(eps, q)^q`` modulo 1, fixing ``k/(2q)`` with
    derivative ``(1 +- eps)^q``.  ``a`` is an attracting fixed point, ``c`` the
    repelling one just before it (so the arc ``(c, a)`` flows into ``a``), ``b``
    the fixed point opposite ``a``, and ``d`` in ``(c, a)`` makes the
    cross-ratio 2.  Then ``f^{nq}(d) -> a`` while ``a, b, c`` stay put.
    """
    if q < 3:
        raise ValueError("the construction needs a denominator q >= 3")
    if math.gcd(p, q) != 1:
        raise ValueError("p and q must be coprime")
    if not 0 <= eps < 1:
        raise ValueError("eps must lie in [0, 1)")
    f = compose(Rotation(p / q), SineShear(eps, q))
    a = 1.0 / (2 * q)
    c = 0.0
    b = a + 0.5
    d = normalize_d(a, b, c)
    return f, Quadruple(a, b, c, d)


def incompatibility_bounds(chi_norm: float):
    """Lower and upper cross-ratio bounds forced by an L2 fixed point of norm
    ``chi_norm`` on quadruples of cross-ratio 2."""
    if chi_norm < 0:
        raise ValueError("chi_norm must be non-negative")
    upper = math.exp((LOG2_SQRT + 2.0 * chi_norm) ** 2)
    lower = math.exp(max(0.0, LOG2_SQRT - 2.0 * chi_norm) ** 2)
    return lower, upper


def implied_chi_lower_bound(max_crossratio: float) -> float:
    """Smallest fixed-point norm compatible with an observed cross-ratio."""
    if not max_crossratio > 1:
        return 0.0
    return max(0.0, (math.sqrt(math.log(max_crossratio)) - LOG2_SQRT) / 2.0)
