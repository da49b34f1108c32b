"""An affine isometry of l2 that is recurrent yet has no fixed point.

Coordinate ``k`` (1-based) is rotated about 1 by the angle ``2 pi / k!``:

    E(x)_k = exp(2 pi i / k!) (x_k - 1) + 1.

Vectors are truncated to ``D`` complex coordinates (the tail is zero, hence
moved by the isometry, but never stored).  Powers are closed form: the angle
of ``E^m`` on coordinate k is the exact rational ``m / k!`` reduced mod 1
with Python integers, so ``E^{n!}`` is literally the identity on the first n
coordinates for every n.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cache

import numpy as np

from . import tables

# Turns whose phase is known exactly in floating point.
_EXACT_PHASES = {
    Fraction(1, 4): 1j,
    Fraction(1, 2): -1.0 + 0j,
    Fraction(3, 4): -1j,
}


@cache
def factorial(k: int) -> int:
    return math.factorial(k)


def turn(m: int, k: int) -> Fraction:
    """Angle of ``E^m`` on coordinate ``k`` in turns, exactly, in ``[0, 1)``."""
    den = factorial(k)
    return Fraction(int(m) % den, den)


def phase(t: Fraction) -> complex:
    if t == 0:
        return 1.0 + 0j
    if t in _EXACT_PHASES:
        return _EXACT_PHASES[t]
    # reduce to (-1/2, 1/2] turns before converting; keeps the float argument small
    if t > Fraction(1, 2):
        t -= 1
    return cmath.exp(2j * math.pi * float(t))


def seq_vector(values, dim: int | None = None) -> np.ndarray:
    """Complex coordinate array ``x_1 .. x_D``; padded with zeros up to ``dim``."""
    v = np.asarray(values, dtype=complex).reshape(-1)
    if dim is not None:
        if v.size > dim:
            raise ValueError(f"{v.size} coordinates do not fit in dimension {dim}")
        v = np.concatenate([v, np.zeros(dim - v.size, dtype=complex)])
    if v.size < 1:
        raise ValueError("a sequence vector needs at least one coordinate")
    if not np.all(np.isfinite(v)):
        raise ValueError("coordinates must be finite")
    return v


@dataclass(frozen=True)
class EdelsteinIsometry:
    dim: int
    active: frozenset | None = None  # 1-based coordinates; None means all

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.active is not None:
            act = frozenset(int(k) for k in self.active)
            bad = [k for k in act if not 1 <= k <= self.dim]
            if bad:
                raise ValueError(f"active coordinates out of range: {sorted(bad)}")
            object.__setattr__(self, "active", act)

    @property
    def coordinates(self):
        return sorted(self.active) if self.active is not None else range(1, self.dim + 1)

    def __call__(self, v):
        return apply_power(self, 1, v)


def apply_power(E: EdelsteinIsometry, m: int, v) -> np.ndarray:
    v = seq_vector(v)
    if v.size != E.dim:
        raise ValueError(f"vector has {v.size} coordinates, isometry has {E.dim}")
    out = v.copy()
    for k in E.coordinates:
        t = turn(m, k)
        if t:
            out[k - 1] = phase(t) * (v[k - 1] - 1.0) + 1.0
    return out


def l2(v) -> float:
    return float(np.linalg.norm(v))


def isometry_check(E: EdelsteinIsometry, u, v, m: int = 1) -> float:
    return abs(l2(apply_power(E, m, u) - apply_power(E, m, v)) - l2(seq_vector(u) - seq_vector(v)))


def unit_gap(n: int) -> float:
    """``|1 - exp(2 pi i / n!)|`` evaluated as ``2 sin(pi / n!)``."""
    return 2.0 * math.sin(math.pi / factorial(n))


def tail_norm_bound(n: int) -> float:
    return 4.0 * math.pi / factorial(n)


# -- recurrence ---------------------------------------------------------------


@dataclass
class EdelsteinScan:
    n: list
    residual: list

    def rows(self):
        return [(n, factorial(n), r) for n, r in zip(self.n, self.residual)]

    def to_csv(self) -> str:
        return tables.csv_text(["n", "n!", "residual"], self.rows())

    def strictly_decreasing(self) -> bool:
        return all(b < a for a, b in zip(self.residual, self.residual[1:]))


def recurrence_scan(E: EdelsteinIsometry, v, n_list) -> EdelsteinScan:
    """Residuals ``||E^{n!}(v) - v||``."""
    ns = [int(n) for n in n_list]
    if any(n < 1 for n in ns):
        raise ValueError("scan indices must be >= 1")
    v = seq_vector(v)
    return EdelsteinScan(ns, [l2(apply_power(E, factorial(n), v) - v) for n in ns])


def recurrence_bound(n: int, v_norm: float, terms: int = 60) -> float:
    """``(||v|| + 1) 4 pi sqrt(sum_k ((n+1)...(n+k))^-2)``; terms decay
    factorially so a few dozen are plenty."""
    total, prod = 0.0, 1.0
    for k in range(1, terms + 1):
        prod *= n + k
        total += prod**-2
        if prod**-2 < 1e-40:
            break
    return (v_norm + 1.0) * 4.0 * math.pi * math.sqrt(total)


def power_recurrence_gap(E: EdelsteinIsometry, v, m: int, n: int) -> float:
    """``m ||E^{n!} v - v|| - ||(E^m)^{n!} v - v||`` (non-negative when the
    power inequality holds)."""
    v = seq_vector(v)
    r = factorial(n)
    return m * l2(apply_power(E, r, v) - v) - l2(apply_power(E, m * r, v) - v)


def orbit_drift(E: EdelsteinIsometry, n: int) -> float:
    """``||E^n(0)|| / n``."""
    if n == 0:
        raise ValueError("n must be nonzero")
    return l2(apply_power(E, n, np.zeros(E.dim, dtype=complex))) / abs(n)


def drift_bound(n: int, terms: int = 30) -> float:
    return sum(tail_norm_bound(k) for k in range(1, terms + 1)) / abs(n)


# -- fixed points -------------------------------------------------------------


@dataclass
class FixedPointReport:
    forced: dict  # coordinate -> forced value, or None when unconstrained
    dim: int

    @property
    def forced_count(self) -> int:
        return sum(1 for x in self.forced.values() if x is not None)

    @property
    def norm_lower_bound(self) -> float:
        """Norm of the part of any candidate fixed point that is pinned down."""
        return math.sqrt(sum(abs(x) ** 2 for x in self.forced.values() if x is not None))

    def summary(self) -> dict:
        return {
            "dim": self.dim,
            "forced_coordinates": self.forced_count,
            "norm_lower_bound": self.norm_lower_bound,
        }


def fixed_point_analysis(E: EdelsteinIsometry) -> FixedPointReport:
    """Solve ``x_k = w_k (x_k - 1) + 1`` coordinate by coordinate.

    In the offset ``y = x_k - 1`` the equation reads ``(1 - w_k) y = 0``.
    Whether ``w_k = 1`` is decided on the exact rational turn (for large k the
    floating phase rounds to 1 although the rotation is not trivial).  A
    nontrivial rotation pins ``y = 0``, i.e. ``x_k = 1``; a trivial one leaves
    the coordinate free (coordinate 1, or inactive ones).
    """
    forced = {}
    for k in range(1, E.dim + 1):
        active = E.active is None or k in E.active
        trivial = not active or turn(1, k) == 0
        forced[k] = None if trivial else 1.0
    return FixedPointReport(forced, E.dim)


# -- commuting families -------------------------------------------------------


@dataclass
class Family:
    seed: int
    dim: int
    members: list

    def descriptor(self) -> dict:
        return {
            "seed": self.seed,
            "dim": self.dim,
            "subsets": [sorted(e.active) for e in self.members],
        }

    def to_json(self) -> str:
        return tables.json_text(self.descriptor())


def random_family(seed: int, k: int, dim: int, density: float = 0.5) -> Family:
    """``k`` isometries rotating random coordinate subsets.

    Each subset contains every coordinate independently with probability
    ``density`` and always at least one coordinate beyond the first, so the
    fixed-point forcing argument applies to every member.
    """
    if k < 2:
        raise ValueError("a family needs k >= 2 members")
    if dim < 2:
        raise ValueError("dim must be >= 2")
    if not 0 < density <= 1:
        raise ValueError("density must lie in (0, 1]")
    rng = np.random.default_rng(seed)
    members = []
    for _ in range(k):
        mask = rng.random(dim) < density
        if not mask[1:].any():
            mask[rng.integers(1, dim)] = True
        members.append(EdelsteinIsometry(dim, frozenset(int(i) + 1 for i in np.nonzero(mask)[0])))
    return Family(seed, dim, members)


def commutation_residual(E1: EdelsteinIsometry, E2: EdelsteinIsometry, v) -> float:
    return l2(E1(E2(v)) - E2(E1(v)))
