"""Affine isometries ``I(v) = Theta v + c`` of a finite-dimensional Euclidean space.

``c`` splits orthogonally as ``c_bar + c_star`` with ``c_star`` in ``Fix(Theta)``
and ``c_bar`` in ``Im(Theta - Id)``.  With ``(Theta - Id) w = c_bar`` the shift
``T(v) = v + w`` conjugates ``I`` to ``Theta + c_star``:

    I^n(v) = Theta^n (v + w) + n c_star - w,

so ``||I^n(v) / n - c_star|| <= (||v|| + 2 ||w||) / |n|`` for every nonzero n.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tables

KERNEL_TOL = 1e-8
ORTHO_TOL = 1e-10
FIXED_TOL = 1e-9


@dataclass(frozen=True)
class EuclideanIsometry:
    theta: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        theta = np.array(self.theta, dtype=float)
        c = np.array(self.c, dtype=float).reshape(-1)
        if theta.ndim != 2 or theta.shape[0] != theta.shape[1]:
            raise ValueError("theta must be a square matrix")
        if theta.shape[0] != c.size:
            raise ValueError("theta and c have mismatched dimensions")
        err = np.max(np.abs(theta.T @ theta - np.eye(c.size)), initial=0.0)
        if err > ORTHO_TOL:
            raise ValueError(f"theta is not orthogonal (max deviation {err:.3g})")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "c", c)

    @property
    def dim(self) -> int:
        return self.c.size

    def __call__(self, v):
        return self.theta @ np.asarray(v, dtype=float) + self.c

    def power(self, n: int, v):
        """``I^n(v)`` by repeated application (inverse steps for n < 0)."""
        v = np.asarray(v, dtype=float)
        if n >= 0:
            for _ in range(n):
                v = self.theta @ v + self.c
        else:
            for _ in range(-n):
                v = self.theta.T @ (v - self.c)
        return v


@dataclass(frozen=True)
class DriftDecomposition:
    c_bar: np.ndarray
    c_star: np.ndarray
    w: np.ndarray
    fix_basis: np.ndarray  # orthonormal columns spanning Fix(theta)

    @property
    def drift(self) -> float:
        return float(np.linalg.norm(self.c_star))


def decompose(I: EuclideanIsometry) -> DriftDecomposition:
    a = I.theta - np.eye(I.dim)
    try:
        _, s, vt = np.linalg.svd(a)
    except np.linalg.LinAlgError as exc:
        raise ValueError("singular value decomposition failed") from exc
    basis = vt[s <= KERNEL_TOL].T
    c_star = basis @ (basis.T @ I.c)
    c_bar = I.c - c_star
    w = np.linalg.lstsq(a, c_bar, rcond=KERNEL_TOL)[0]
    return DriftDecomposition(c_bar, c_star, w, basis)


def drift(I: EuclideanIsometry) -> float:
    return decompose(I).drift


@dataclass(frozen=True)
class FixedPoint:
    v: np.ndarray
    residual: float


@dataclass(frozen=True)
class TranslationAxis:
    w: np.ndarray
    c_star: np.ndarray


def fixed_point_or_axis(I: EuclideanIsometry):
    """A fixed point ``-w`` when the drift vanishes, else the axis data."""
    dec = decompose(I)
    if dec.drift <= FIXED_TOL:
        v = -dec.w
        return FixedPoint(v, float(np.linalg.norm(I(v) - v)))
    return TranslationAxis(dec.w, dec.c_star)


def conjugate_power(I: EuclideanIsometry, n: int, v, dec: DriftDecomposition | None = None):
    """``I^n(v)`` through the conjugation to ``Theta + c_star``."""
    dec = dec or decompose(I)
    u = np.asarray(v, dtype=float) + dec.w
    tn = np.linalg.matrix_power(I.theta, n) if n >= 0 else np.linalg.matrix_power(I.theta.T, -n)
    return tn @ u + n * dec.c_star - dec.w


@dataclass
class ConvergenceTable:
    n: list
    deviation: list
    bound: list

    def rows(self):
        return list(zip(self.n, self.deviation, self.bound))

    @property
    def holds(self) -> bool:
        return all(d <= b + FIXED_TOL for _, d, b in self.rows())

    def to_csv(self) -> str:
        return tables.csv_text(["n", "deviation", "bound"], self.rows())


def convergence_check(I: EuclideanIsometry, v, n_max: int, negative: bool = True):
    """Deviation ``||I^n(v)/n - c_star||`` against ``(||v|| + 2||w||)/|n|``.

    Iterates directly (one step at a time) so the table checks the bound
    independently of the closed form.  Negative n are appended when asked.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    dec = decompose(I)
    v = np.asarray(v, dtype=float)
    scale = np.linalg.norm(v) + 2 * np.linalg.norm(dec.w)
    table = ConvergenceTable([], [], [])
    signs = (1, -1) if negative else (1,)
    for sign in signs:
        x = v
        for k in range(1, n_max + 1):
            x = I.theta @ x + I.c if sign > 0 else I.theta.T @ (x - I.c)
            n = sign * k
            table.n.append(n)
            table.deviation.append(float(np.linalg.norm(x / n - dec.c_star)))
            table.bound.append(float(scale / k))
    return table


def random_orthogonal(dim: int, rng, fixed_dim: int = 0):
    """Haar-random orthogonal matrix; ``fixed_dim > 0`` forces a fixed
    subspace of at least that dimension."""
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    q = q * np.sign(np.diag(r))
    if fixed_dim:
        k = dim - fixed_dim
        if k <= 0:
            return np.eye(dim)
        inner, r2 = np.linalg.qr(rng.standard_normal((k, k)))
        inner = inner * np.sign(np.diag(r2))
        block = np.eye(dim)
        block[:k, :k] = inner
        return q @ block @ q.T
    return q


def random_isometry(rng, dim: int, fixed_dim: int = 0, zero_drift: bool = False):
    theta = random_orthogonal(dim, rng, fixed_dim)
    c = rng.standard_normal(dim)
    inst = EuclideanIsometry(theta, c)
    if zero_drift:
        dec = decompose(inst)
        inst = EuclideanIsometry(theta, dec.c_bar)
    return inst
