"""Discretised vectors of C0(S1), L1(S1) and Lp(S1 x S1).

A grid function carries samples on a uniform grid and, when known, the
closed-form generator that produced them.  Generators let the linear
representations and the isometry powers compose exactly; linear
interpolation is the fallback for sample-only data.

1-D nodes are the midpoints ``(k + 1/2) / N``.  On the torus the two axes are
offset by half a cell, ``x_i = (i + 1/4) / N`` and ``y_j = (j + 3/4) / N``,
so that no node sits on the diagonal where the projective cocycle is
singular.  1-D generators map an array to an array; 2-D generators take the
two axis arrays and return the tensor grid ``(len(xs), len(ys))``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np

from .circle import Diffeo

DEFAULT_N1 = 2**12
DEFAULT_N2 = 2**8

# 2-D norms of unmaterialised functions are accumulated in row blocks of
# about this many entries.
BLOCK_ENTRIES = 2**21


@dataclass(frozen=True)
class SpaceTag:
    name: str
    p: float = 1.0

    def __post_init__(self):
        if self.name not in ("C0", "L1", "L2pair", "Lppair"):
            raise ValueError(f"unknown space {self.name!r}")
        if self.name == "Lppair" and not self.p > 1:
            raise ValueError("Lppair needs p > 1")

    @property
    def arity(self) -> int:
        return 2 if self.name in ("L2pair", "Lppair") else 1

    def __str__(self):
        return f"Lppair({self.p:g})" if self.name == "Lppair" else self.name


C0 = SpaceTag("C0", math.inf)
L1 = SpaceTag("L1", 1.0)
L2PAIR = SpaceTag("L2pair", 2.0)


def lp_pair(p: float) -> SpaceTag:
    return L2PAIR if p == 2 else SpaceTag("Lppair", float(p))


def _check_power_of_two(n):
    if n < 1 or n & (n - 1):
        raise ValueError(f"grid size must be a power of two, got {n}")


def nodes1(n: int) -> np.ndarray:
    return (np.arange(n) + 0.5) / n


def nodes2(n: int):
    return (np.arange(n) + 0.25) / n, (np.arange(n) + 0.75) / n


def _interp1(samples, x):
    n = samples.size
    return np.interp(np.mod(x, 1.0), nodes1(n), samples, period=1.0)


def _interp_axis(x, n, offset):
    """Periodic linear-interpolation indices and weights for one axis."""
    t = np.mod(x, 1.0) * n - offset
    i0 = np.floor(t).astype(int)
    w = t - i0
    return i0 % n, (i0 + 1) % n, w


class GridFunction:
    arity = 0

    def __init__(self, n, samples=None, generator=None, name=None):
        _check_power_of_two(n)
        if samples is None and generator is None:
            raise ValueError("need samples or a generator")
        if samples is not None:
            samples = np.asarray(samples, dtype=float)
            if samples.shape != (n,) * self.arity:
                raise ValueError(f"samples must have shape {(n,) * self.arity}")
            if not np.all(np.isfinite(samples)):
                raise ValueError("samples must be finite")
        self.n = n
        self._samples = samples
        self.generator = generator
        self.name = name

    @property
    def samples(self) -> np.ndarray:
        if self._samples is None:
            self._samples = np.asarray(self.generator(*self.nodes), dtype=float)
        return self._samples

    @property
    def materialized(self) -> bool:
        return self._samples is not None

    def _combine(self, other, op, name):
        if isinstance(other, GridFunction):
            if type(other) is not type(self) or other.n != self.n:
                raise ValueError("grid functions must share arity and N")
            if self.generator is not None and other.generator is not None:
                g1, g2 = self.generator, other.generator
                return type(self)(self.n, generator=lambda *a: op(g1(*a), g2(*a)), name=name)
            return type(self)(self.n, samples=op(self.samples, other.samples), name=name)
        return NotImplemented

    def __add__(self, other):
        return self._combine(other, np.add, None)

    def __sub__(self, other):
        return self._combine(other, np.subtract, None)

    def __mul__(self, alpha):
        alpha = float(alpha)
        if self.generator is not None:
            g = self.generator
            return type(self)(self.n, generator=lambda *a: alpha * g(*a))
        return type(self)(self.n, samples=alpha * self.samples)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0


class GridFunction1(GridFunction):
    """Function on the circle sampled at N midpoints."""

    arity = 1

    @property
    def nodes(self):
        return (nodes1(self.n),)

    def evaluate(self, x):
        if self.generator is not None:
            return self.generator(np.asarray(x, dtype=float))
        return _interp1(self.samples, x)


class GridFunction2(GridFunction):
    """Function on the torus sampled on the offset N x N grid."""

    arity = 2

    @property
    def nodes(self):
        return nodes2(self.n)

    def evaluate(self, xs, ys):
        """Values on the tensor grid ``xs x ys``."""
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if self.generator is not None:
            return self.generator(xs, ys)
        s = self.samples
        i0, i1, wx = _interp_axis(xs, self.n, 0.25)
        j0, j1, wy = _interp_axis(ys, self.n, 0.75)
        wx, wy = wx[:, None], wy[None, :]
        return (
            (1 - wx) * (1 - wy) * s[np.ix_(i0, j0)]
            + wx * (1 - wy) * s[np.ix_(i1, j0)]
            + (1 - wx) * wy * s[np.ix_(i0, j1)]
            + wx * wy * s[np.ix_(i1, j1)]
        )

    def row_blocks(self):
        """Yield row blocks of samples without materialising the full grid."""
        if self.materialized:
            yield self.samples
            return
        xs, ys = self.nodes
        step = max(1, BLOCK_ENTRIES // self.n)
        for start in range(0, self.n, step):
            yield np.asarray(self.generator(xs[start : start + step], ys), dtype=float)


def grid_function(tag: SpaceTag, n: int, generator, name=None) -> GridFunction:
    cls = GridFunction2 if tag.arity == 2 else GridFunction1
    return cls(n, generator=generator, name=name)


def norm(tag: SpaceTag, v: GridFunction) -> float:
    if tag.arity != v.arity:
        raise ValueError(f"space {tag} needs arity {tag.arity}, got {v.arity}")
    blocks = v.row_blocks() if v.arity == 2 else [v.samples]
    count = v.n**v.arity
    if tag.name == "C0":
        return max(float(np.max(np.abs(b))) for b in blocks)
    if tag.name == "L1":
        return sum(float(np.sum(np.abs(b))) for b in blocks) / count
    if tag.name == "L2pair":
        return math.sqrt(sum(float(np.sum(b * b)) for b in blocks) / count)
    p = tag.p
    return (sum(float(np.sum(np.abs(b) ** p)) for b in blocks) / count) ** (1.0 / p)


def represent(tag: SpaceTag, f: Diffeo, v: GridFunction) -> GridFunction:
    """Linear isometric action ``Theta_f``.

    C0: ``v o f``;  L1: ``v o f * Df``;  Lp pairs: ``v(fx, fy) (Df(x) Df(y))^(1/p)``.
    """
    if tag.arity != v.arity:
        raise ValueError(f"space {tag} needs arity {tag.arity}, got {v.arity}")
    if tag.arity == 1:
        weighted = tag.name == "L1"

        def gen(x):
            F, D = f.jet(x, 1)
            out = v.evaluate(F)
            return out * D if weighted else out

        if v.generator is not None:
            return GridFunction1(v.n, generator=gen)
        return GridFunction1(v.n, samples=gen(nodes1(v.n)))

    inv_p = 1.0 / tag.p

    def gen2(xs, ys):
        Fx, Dx = f.jet(xs, 1)
        Fy, Dy = f.jet(ys, 1)
        return v.evaluate(Fx, Fy) * (Dx[:, None] * Dy[None, :]) ** inv_p

    if v.generator is not None:
        return GridFunction2(v.n, generator=gen2)
    return GridFunction2(v.n, samples=gen2(*nodes2(v.n)))


# -- serialisation ------------------------------------------------------------


def header(tag: SpaceTag, v: GridFunction) -> dict:
    out = {"tag": str(tag), "N": v.n}
    if v.name:
        out["generator"] = v.name
    return out


def to_csv(v: GridFunction, stream=None) -> str:
    """Write ``index, sample`` rows (``i, j, sample`` on the torus)."""
    buf = stream if stream is not None else io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if v.arity == 1:
        w.writerow(["index", "sample"])
        for k, s in enumerate(v.samples):
            w.writerow([k, repr(float(s))])
    else:
        w.writerow(["i", "j", "sample"])
        for (i, j), s in np.ndenumerate(v.samples):
            w.writerow([i, j, repr(float(s))])
    return buf.getvalue() if stream is None else ""


def from_csv(text: str, n: int | None = None) -> GridFunction:
    rows = list(csv.reader(io.StringIO(text)))
    head, body = rows[0], rows[1:]
    if head == ["index", "sample"]:
        samples = np.array([float(r[1]) for r in body])
        return GridFunction1(samples.size, samples=samples)
    size = n or int(round(math.sqrt(len(body))))
    samples = np.zeros((size, size))
    for i, j, s in body:
        samples[int(i), int(j)] = float(s)
    return GridFunction2(size, samples=samples)


def header_json(tag: SpaceTag, v: GridFunction) -> str:
    return json.dumps(header(tag, v), sort_keys=True)


# -- named test vectors -------------------------------------------------------

_TWO_PI = 2.0 * np.pi


def _named_1d(name):
    return {
        "zero": lambda x: np.zeros_like(x),
        "sin": lambda x: np.sin(_TWO_PI * x),
        "cos": lambda x: np.cos(_TWO_PI * x),
    }[name]


def _named_2d(name):
    return {
        "zero": lambda xs, ys: np.zeros((xs.size, ys.size)),
        "sin": lambda xs, ys: np.outer(np.sin(_TWO_PI * xs), np.sin(_TWO_PI * ys)),
        "cos": lambda xs, ys: np.cos(_TWO_PI * xs)[:, None] + np.cos(_TWO_PI * ys)[None, :],
    }[name]


VECTOR_NAMES = ("zero", "sin", "cos")


def named_vector(tag: SpaceTag, name: str, n: int | None = None) -> GridFunction:
    """Smooth test vectors.  On the torus ``sin`` is ``sin(2 pi x) sin(2 pi y)``
    and ``cos`` is ``cos(2 pi x) + cos(2 pi y)``."""
    if name not in VECTOR_NAMES:
        raise ValueError(f"unknown vector {name!r}; choose from {', '.join(VECTOR_NAMES)}")
    if tag.arity == 1:
        return grid_function(tag, n or DEFAULT_N1, _named_1d(name), name=name)
    return grid_function(tag, n or DEFAULT_N2, _named_2d(name), name=name)
