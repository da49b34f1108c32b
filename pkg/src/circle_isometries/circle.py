"""Circle diffeomorphisms as closed-form expression trees.

Every map is stored through its lift ``F: R -> R`` with ``F(x + 1) = F(x) + 1``.
Derivatives up to order three are propagated exactly through compositions
(Faa di Bruno) and inverses (inverse-function rule), so cocycles built on top
never see finite-difference noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

TWO_PI = 2.0 * np.pi

INVERSE_TOL = 1e-12
INVERSE_MAX_ITER = 200
RATIONAL_CUTOFF = 1e-14


class ConvergenceError(RuntimeError):
    """Raised when the safeguarded Newton inversion fails to converge."""


def _identity_jet(x, order):
    x = np.asarray(x, dtype=float)
    jet = [x.copy(), np.ones_like(x)]
    jet += [np.zeros_like(x)] * (order - 1)
    return jet[: order + 1]


def _chain(outer, inner, order):
    """Jet of ``g o h`` from the jet of ``g`` (taken at ``h``) and the jet of ``h``."""
    out = [outer[0]]
    if order >= 1:
        out.append(outer[1] * inner[1])
    if order >= 2:
        out.append(outer[2] * inner[1] ** 2 + outer[1] * inner[2])
    if order >= 3:
        out.append(
            outer[3] * inner[1] ** 3
            + 3.0 * outer[2] * inner[1] * inner[2]
            + outer[1] * inner[3]
        )
    return out


class Diffeo:
    """Base class of the expression tree.

    Subclasses implement :meth:`jet`, returning ``[F, DF, D2F, D3F]`` truncated
    at ``order``.  Calling a diffeo evaluates its lift.
    """

    def jet(self, x, order=1):
        raise NotImplementedError

    def __call__(self, x):
        return self.jet(x, 0)[0]

    def lift1(self, x: float) -> float:
        """Scalar lift evaluation in plain floats (fast path for long orbits)."""
        raise NotImplementedError

    def spec(self) -> str:
        raise NotImplementedError

    def __str__(self):
        return self.spec()


@dataclass(frozen=True)
class Rotation(Diffeo):
    rho: float

    def jet(self, x, order=1):
        jet = _identity_jet(x, order)
        jet[0] = jet[0] + self.rho
        return jet

    def lift1(self, x):
        return x + self.rho

    def spec(self):
        return f"rot:{self.rho!r}"


@dataclass(frozen=True)
class SineShear(Diffeo):
    """Lift ``x + eps / (2 pi q) * sin(2 pi q x)``.

    Commutes with the rotation by ``1/q``; its fixed points are ``k / (2q)``
    with derivative ``1 + eps`` (k even) or ``1 - eps`` (k odd).
    """

    eps: float
    q: int = 1

    def __post_init__(self):
        if not abs(self.eps) < 1:
            raise ValueError(f"SineShear needs |eps| < 1, got {self.eps}")
        if int(self.q) != self.q or self.q < 1:
            raise ValueError(f"SineShear needs a positive integer q, got {self.q}")

    def jet(self, x, order=1):
        x = np.asarray(x, dtype=float)
        w = TWO_PI * self.q
        s, c = np.sin(w * x), np.cos(w * x)
        jet = [x + self.eps / w * s]
        if order >= 1:
            jet.append(1.0 + self.eps * c)
        if order >= 2:
            jet.append(-w * self.eps * s)
        if order >= 3:
            jet.append(-(w**2) * self.eps * c)
        return jet

    def lift1(self, x):
        w = 2.0 * math.pi * self.q
        return x + self.eps / w * math.sin(w * x)

    def deriv1(self, x):
        return 1.0 + self.eps * math.cos(2.0 * math.pi * self.q * x)

    def spec(self):
        return f"shear:{self.eps!r}:{self.q}"


@dataclass(frozen=True)
class Compose(Diffeo):
    """``outer o inner``."""

    outer: Diffeo
    inner: Diffeo

    def jet(self, x, order=1):
        inner = self.inner.jet(x, order)
        return _chain(self.outer.jet(inner[0], order), inner, order)

    def lift1(self, x):
        return self.outer.lift1(self.inner.lift1(x))

    def spec(self):
        return f"comp({self.outer.spec()},{self.inner.spec()})"


@dataclass(frozen=True)
class Inverse(Diffeo):
    f: Diffeo

    def jet(self, y, order=1):
        x = inverse_eval(self.f, y)
        if order == 0:
            return [x]
        fj = self.f.jet(x, order)
        d1 = 1.0 / fj[1]
        jet = [x, d1]
        if order >= 2:
            jet.append(-fj[2] * d1**3)
        if order >= 3:
            jet.append((3.0 * fj[2] ** 2 - fj[1] * fj[3]) * d1**5)
        return jet

    def lift1(self, y):
        if not hasattr(self.f, "deriv1"):
            return float(inverse_eval(self.f, y))
        f = self.f
        x = y - (f.lift1(y) - y)
        lo, hi = x - 1.0, x + 1.0
        for _ in range(INVERSE_MAX_ITER):
            r = f.lift1(x) - y
            if abs(r) <= INVERSE_TOL:
                return x
            if r < 0:
                lo = x
            else:
                hi = x
            xn = x - r / f.deriv1(x)
            x = xn if lo < xn < hi else 0.5 * (lo + hi)
        raise ConvergenceError(f"inverse of {f.spec()} did not converge")

    def spec(self):
        return f"inv({self.f.spec()})"


@dataclass(frozen=True)
class Power(Diffeo):
    f: Diffeo
    m: int

    def jet(self, x, order=1):
        step = self.f if self.m > 0 else inverse(self.f)
        jet = _identity_jet(x, order)
        for _ in range(abs(self.m)):
            jet = _chain(step.jet(jet[0], order), jet, order)
        return jet

    def lift1(self, x):
        step = self.f if self.m > 0 else inverse(self.f)
        for _ in range(abs(self.m)):
            x = step.lift1(x)
        return x

    def spec(self):
        return f"pow({self.f.spec()},{self.m})"


# -- constructors -------------------------------------------------------------


def compose(f: Diffeo, g: Diffeo) -> Diffeo:
    """``f o g``: apply ``g`` first."""
    return Compose(f, g)


def inverse(f: Diffeo) -> Diffeo:
    """Inverse, pushed down the tree so that only primitives get a Newton solve."""
    if isinstance(f, Rotation):
        return Rotation(-f.rho)
    if isinstance(f, Inverse):
        return f.f
    if isinstance(f, Compose):
        return Compose(inverse(f.inner), inverse(f.outer))
    if isinstance(f, Power):
        return power(f.f, -f.m)
    return Inverse(f)


def power(f: Diffeo, m: int) -> Diffeo:
    m = int(m)
    if m == 0:
        return Rotation(0.0)
    if isinstance(f, Rotation):
        return Rotation(m * f.rho)
    if m == 1:
        return f
    return Power(f, m)


def conj(h: Diffeo, g: Diffeo) -> Diffeo:
    """``h o g o h^-1``."""
    return compose(h, compose(g, inverse(h)))


# -- evaluation ---------------------------------------------------------------


def lift_eval(f: Diffeo, x):
    return f(x)


def evaluate(f: Diffeo, x):
    """Circle-point evaluation, ``F(x) mod 1``."""
    return np.mod(f(x), 1.0)


def deriv(f: Diffeo, x, order=1):
    if order not in (1, 2, 3):
        raise ValueError(f"derivative order must be 1, 2 or 3, got {order}")
    return f.jet(x, order)[order]


def inverse_eval(f: Diffeo, y, tol=INVERSE_TOL, max_iter=INVERSE_MAX_ITER):
    """Solve ``F(x) = y`` on the lift by Newton steps safeguarded by bisection.

    The bracket is ``[y - d - 1, y - d + 1]`` with ``d = F(y) - y``; it always
    contains the root because ``F - id`` oscillates by less than one.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    y = np.asarray(y, dtype=float)
    d = f(y) - y
    x = y - d
    lo, hi = x - 1.0, x + 1.0
    for _ in range(max_iter):
        F, DF = f.jet(x, 1)
        r = F - y
        if np.all(np.abs(r) <= tol):
            return x
        lo = np.where(r < 0, x, lo)
        hi = np.where(r > 0, x, hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            xn = x - r / DF
        bad = ~np.isfinite(xn) | (xn <= lo) | (xn >= hi)
        x = np.where(np.abs(r) <= tol, x, np.where(bad, 0.5 * (lo + hi), xn))
    raise ConvergenceError(
        f"inverse of {f.spec()} did not converge in {max_iter} iterations"
    )


# -- orbits -------------------------------------------------------------------


@dataclass
class OrbitData:
    """Orbit ``x, f(x), ..., f^n(x)`` with accumulated derivative data.

    ``points`` are circle points in [0, 1) and ``winding`` the integer part of
    the lift, so the lift of step ``k`` is ``points[k] + winding[k]``.
    ``logD[k] = log Df^k`` and ``affine[k] = D2f^k / Df^k`` at the start point.
    """

    points: np.ndarray
    winding: np.ndarray
    logD: np.ndarray
    affine: np.ndarray

    @property
    def lift(self):
        return self.points + self.winding


def walk(f: Diffeo, x, n: int):
    """Yield ``(k, point, winding, logD, affine)`` for ``k = 0..|n|``.

    Negative ``n`` walks along ``f^-1``.  Points are reduced mod 1 at every
    step (the winding is carried separately) so long orbits keep full
    resolution near a fixed circle point.
    """
    step = f if n >= 0 else inverse(f)
    x = np.asarray(x, dtype=float)
    wind = np.floor(x)
    pt = x - wind
    logD = np.zeros_like(pt)
    aff = np.zeros_like(pt)
    yield 0, pt, wind, logD, aff
    for k in range(1, abs(n) + 1):
        F, D1, D2 = step.jet(pt, 2)
        # affine cocycle: A_{k+1} = A_k + (D2f/Df)(x_k) * Df^k
        aff = aff + D2 / D1 * np.exp(logD)
        logD = logD + np.log(D1)
        shift = np.floor(F)
        pt = F - shift
        wind = wind + shift
        yield k, pt, wind, logD, aff


def iterate_orbit(f: Diffeo, x, n: int) -> OrbitData:
    states = list(walk(f, x, n))
    return OrbitData(
        points=np.array([s[1] for s in states]),
        winding=np.array([s[2] for s in states]),
        logD=np.array([s[3] for s in states]),
        affine=np.array([s[4] for s in states]),
    )


def orbit_states(f: Diffeo, x, times):
    """Endpoint data ``{n: (lift, logD, affine)}`` for every n in ``times``.

    One walk per sign, so a whole scan costs ``max |n|`` steps.
    """
    times = sorted(set(int(t) for t in times))
    out = {}
    for sign in (1, -1):
        wanted = {abs(t) for t in times if (t > 0 if sign > 0 else t < 0)}
        if sign > 0 and 0 in times:
            wanted.add(0)
        if not wanted:
            continue
        for k, pt, wind, logD, aff in walk(f, x, sign * max(wanted)):
            if k in wanted:
                out[sign * k] = (pt + wind, logD, aff)
    return out


def rotation_number(f: Diffeo, n_iter: int = 100_000) -> float:
    """Birkhoff displacement ``(F^n(0) - 0) / n``; error at most ``1 / n_iter``."""
    if n_iter < 1:
        raise ValueError("n_iter must be >= 1")
    pt, wind = 0.0, 0.0
    for _ in range(n_iter):
        F = f.lift1(pt)
        shift = math.floor(F)
        pt = F - shift
        wind += shift
    return (wind + pt) / n_iter


# -- continued fractions ------------------------------------------------------


@dataclass
class ContinuedFraction:
    rho: float
    partial_quotients: list = field(default_factory=list)
    convergents: list = field(default_factory=list)

    @property
    def denominators(self):
        return [q for _, q in self.convergents]

    def fraction(self, n: int) -> Fraction:
        p, q = self.convergents[n]
        return Fraction(p, q)


def continued_fraction(rho: float, depth: int) -> ContinuedFraction:
    """Euclidean expansion of ``rho`` in (0, 1), stopping early on rationals."""
    if not 0 < rho < 1:
        raise ValueError("rho must lie in (0, 1)")
    if depth < 1:
        raise ValueError("depth must be >= 1")
    cf = ContinuedFraction(rho)
    p_prev, q_prev, p, q = 1, 0, 0, 1
    x = rho
    for _ in range(depth):
        inv = 1.0 / x
        a = math.floor(inv)
        r = inv - a
        if 1.0 - r < RATIONAL_CUTOFF:
            a, r = a + 1, 0.0
        p_prev, q_prev, p, q = p, q, a * p + p_prev, a * q + q_prev
        cf.partial_quotients.append(a)
        cf.convergents.append((p, q))
        if r < RATIONAL_CUTOFF:
            break
        x = r
    return cf


def fibonacci_denominators(k: int) -> list:
    """First ``k`` convergent denominators of the golden mean: 1, 2, 3, 5, ..."""
    out, a, b = [], 1, 2
    for _ in range(k):
        out.append(a)
        a, b = b, a + b
    return out


# -- validation ---------------------------------------------------------------


def check_diffeo(f: Diffeo, samples: int = 1000, tol: float = 1e-12) -> None:
    """Raise ValueError unless ``f`` is monotone, degree one, with D > 0 on samples."""
    x = (np.arange(samples) + 0.5) / samples
    F, D = f.jet(x, 1)
    if np.any(np.diff(F) <= 0):
        raise ValueError(f"{f.spec()} is not strictly increasing on samples")
    if np.max(np.abs(f(x + 1.0) - F - 1.0)) > tol:
        raise ValueError(f"{f.spec()} is not a degree-one lift")
    if np.any(D <= 0):
        raise ValueError(f"{f.spec()} has a non-positive derivative")
