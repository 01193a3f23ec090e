"""Manifolds with exponential charts, finite-difference differentials and RK4 flows.

Every manifold exposes ``chart(x, v)`` (the chart centred at ``x``) and its
local inverse ``local(x, y)``. On a matrix group the chart is
``v -> exp(sum v_i e_i) x``, so chart-basis tangent coefficients are the
right-trivialized ones. All tensors in this package are expressed in these
bases.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .group import MatrixGroupModel

FD_STEP = 1e-5


class ChartError(ValueError):
    """A map does not send the source chart centre to the target chart centre."""


class Manifold:
    dim: int

    def chart(self, x, v):
        raise NotImplementedError

    def local(self, x, y) -> np.ndarray:
        raise NotImplementedError

    def distance(self, x, y) -> float:
        raise NotImplementedError

    def velocity(self, y, v):
        """Ambient velocity of the chart-basis tangent vector v at y."""
        raise NotImplementedError

    def add(self, y, dy):
        """Ambient update used by the integrators."""
        raise NotImplementedError

    def retract(self, y):
        return y


@dataclass(frozen=True, eq=False)
class VectorSpace(Manifold):
    dim: int

    def chart(self, x, v):
        return np.asarray(x, dtype=float) + np.asarray(v, dtype=float)

    def local(self, x, y):
        return np.asarray(y, dtype=float) - np.asarray(x, dtype=float)

    def distance(self, x, y):
        return float(np.abs(np.asarray(x) - np.asarray(y)).max(initial=0.0))

    def velocity(self, y, v):
        return np.asarray(v, dtype=float)

    def add(self, y, dy):
        return y + dy


@dataclass(frozen=True, eq=False)
class GroupManifold(Manifold):
    model: MatrixGroupModel

    @property
    def dim(self):
        return self.model.dim

    def chart(self, x, v):
        return self.model.exp(v) @ x

    def local(self, x, y):
        return self.model.log(y @ np.linalg.inv(x))

    def distance(self, x, y):
        return float(np.abs(x - y).max())

    def velocity(self, y, v):
        return self.model.hat(v) @ y

    def add(self, y, dy):
        return y + dy

    def retract(self, y):
        return self.model.retract(y)


class ProductManifold(Manifold):
    """Cartesian product; points are tuples (``point_type`` rebuilds NamedTuples)."""

    def __init__(self, factors: Sequence[Manifold], point_type: Callable = tuple):
        self.factors = tuple(factors)
        self.point_type = point_type
        self.dims = [f.dim for f in self.factors]
        self.offsets = np.cumsum([0] + self.dims)
        self.dim = int(self.offsets[-1])

    def _make(self, parts):
        return self.point_type(*parts) if self.point_type is not tuple else tuple(parts)

    def split(self, v):
        v = np.asarray(v, dtype=float)
        return [v[a:b] for a, b in zip(self.offsets[:-1], self.offsets[1:])]

    def chart(self, x, v):
        return self._make([f.chart(xi, vi) for f, xi, vi in zip(self.factors, x, self.split(v))])

    def local(self, x, y):
        return np.concatenate([f.local(xi, yi) for f, xi, yi in zip(self.factors, x, y)])

    def distance(self, x, y):
        return max(f.distance(xi, yi) for f, xi, yi in zip(self.factors, x, y))

    def velocity(self, y, v):
        return self._make([f.velocity(yi, vi) for f, yi, vi in zip(self.factors, y, self.split(v))])

    def add(self, y, dy):
        return self._make([f.add(yi, di) for f, yi, di in zip(self.factors, y, dy)])

    def retract(self, y):
        return self._make([f.retract(yi) for f, yi in zip(self.factors, y)])


def _scale(m: Manifold, dy, s: float):
    if isinstance(m, ProductManifold):
        return m._make([_scale(f, d, s) for f, d in zip(m.factors, dy)])
    return dy * s


def _sum(m: Manifold, *terms):
    if isinstance(m, ProductManifold):
        return m._make([_sum(f, *parts) for f, parts in zip(m.factors, zip(*terms))])
    out = terms[0]
    for t in terms[1:]:
        out = out + t
    return out


def pushforward_in_chart(f: Callable, src: Manifold, x, dst: Manifold, y=None, h: float = FD_STEP,
                         tol: float = 1e-8) -> np.ndarray:
    """Central-difference Jacobian of f between the charts centred at x and f(x)."""
    fx = f(x)
    if y is None:
        y = fx
    elif dst.distance(fx, y) > tol:
        raise ChartError(f"map sends the source chart centre {dst.distance(fx, y):.2e} away from the target centre")
    cols = []
    for i in range(src.dim):
        e = np.zeros(src.dim)
        e[i] = h
        cols.append((dst.local(y, f(src.chart(x, e))) - dst.local(y, f(src.chart(x, -e)))) / (2 * h))
    return np.column_stack(cols) if cols else np.zeros((dst.dim, 0))


def gradient(f: Callable, m: Manifold, x, h: float = FD_STEP, order: int = 2) -> np.ndarray:
    """Chart-basis differential of a scalar function by central differences of order 2 or 4."""
    if order not in (2, 4):
        raise ValueError("order must be 2 or 4")
    g = np.empty(m.dim)
    for i in range(m.dim):
        e = np.zeros(m.dim)
        e[i] = h
        d1 = (f(m.chart(x, e)) - f(m.chart(x, -e))) / (2 * h)
        if order == 2:
            g[i] = d1
        else:
            d2 = (f(m.chart(x, 2 * e)) - f(m.chart(x, -2 * e))) / (4 * h)
            g[i] = (4 * d1 - d2) / 3
    return g


def rk4_flow(m: Manifold, field: Callable, x, t: float, steps: int = 8):
    """Integrate y' = field(y) (chart-basis vectors) from x for time t.

    Stages are combined in the ambient matrix space and the result is
    retracted to the manifold after each step.
    """
    if steps < 1:
        raise ValueError("at least one step is required")
    dt = t / steps
    y = x
    for _ in range(steps):
        k1 = m.velocity(y, field(y))
        y2 = m.retract(m.add(y, _scale(m, k1, dt / 2)))
        k2 = m.velocity(y2, field(y2))
        y3 = m.retract(m.add(y, _scale(m, k2, dt / 2)))
        k3 = m.velocity(y3, field(y3))
        y4 = m.retract(m.add(y, _scale(m, k3, dt)))
        k4 = m.velocity(y4, field(y4))
        incr = _sum(m, k1, _scale(m, k2, 2.0), _scale(m, k3, 2.0), k4)
        y = m.retract(m.add(y, _scale(m, incr, dt / 6)))
    return y
