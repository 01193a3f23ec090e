"""Poisson bivectors in chart bases, brackets and residual checks.

A bivector evaluation is the antisymmetric matrix ``P`` with
``P[i, j] = {x_i, x_j}`` in the chart centred at the point, so
``{f, g} = df . P . dg`` and the sharp map is ``pi^#(alpha) = P^T alpha``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .algebra import LieBialgebraData, cobracket
from .charts import GroupManifold, Manifold, gradient, pushforward_in_chart, rk4_flow
from .group import MatrixGroupModel

ANTISYMMETRY_GUARD = 1e-9


class BivectorError(ValueError):
    pass


@dataclass(frozen=True)
class BivectorEvaluation:
    point: object
    matrix: np.ndarray

    def sharp(self, alpha) -> np.ndarray:
        return self.matrix.T @ np.asarray(alpha, dtype=float)


@dataclass(frozen=True, eq=False)
class BivectorProvider:
    """A Poisson tensor on ``manifold``; ``kind`` is ZERO, COBOUNDARY,
    CONSTANT_SYMPLECTIC, HEISENBERG_DOUBLE or CUSTOM."""

    manifold: Manifold
    raw: Callable = field(repr=False)
    kind: str = "CUSTOM"
    params: dict = field(default_factory=dict)

    def evaluate(self, x) -> np.ndarray:
        m = np.asarray(self.raw(x), dtype=float)
        if m.shape != (self.manifold.dim, self.manifold.dim):
            raise BivectorError(f"bivector has shape {m.shape}, expected square of size {self.manifold.dim}")
        skew = np.abs(m + m.T).max(initial=0.0)
        if skew > ANTISYMMETRY_GUARD * max(1.0, np.abs(m).max(initial=0.0)):
            raise BivectorError(f"bivector is not antisymmetric (|P + P^T| = {skew:.2e})")
        return 0.5 * (m - m.T)

    def at(self, x) -> BivectorEvaluation:
        return BivectorEvaluation(x, self.evaluate(x))

    def scaled(self, s: float) -> "BivectorProvider":
        return BivectorProvider(self.manifold, lambda x: s * self.raw(x), self.kind, {**self.params, "scale": s})


def zero_bivector(m: Manifold) -> BivectorProvider:
    return BivectorProvider(m, lambda x: np.zeros((m.dim, m.dim)), "ZERO")


def constant_bivector(m: Manifold, matrix) -> BivectorProvider:
    matrix = np.asarray(matrix, dtype=float)
    return BivectorProvider(m, lambda x: matrix, "CONSTANT_SYMPLECTIC", {"matrix": matrix.tolist()})


def coboundary_bivector(bi: LieBialgebraData, model: MatrixGroupModel) -> BivectorProvider:
    """pi(g) = r^R - r^L, i.e. ``r - Ad_g r Ad_g^T`` in the right-trivialized chart."""
    if bi.r_matrix is None:
        raise ValueError("coboundary bivector needs an r-matrix")
    r = bi.r_matrix

    def raw(g):
        a = model.adjoint(g)
        return r - a @ r @ a.T

    return BivectorProvider(GroupManifold(model), raw, "COBOUNDARY", {"r": r.tolist()})


def poisson_bracket(p: BivectorProvider, f: Callable, g: Callable, x, h: float = 1e-5, order: int = 2) -> float:
    m = p.manifold
    return float(gradient(f, m, x, h, order) @ p.evaluate(x) @ gradient(g, m, x, h, order))


def jacobi_identity_residual(p: BivectorProvider, x, f: Callable, g: Callable, k: Callable,
                             h_inner: float = 1e-3, h_outer: float = 1e-3) -> float:
    """Cyclic sum {{f,g},k} + cyc by nested central differences.

    Both levels use fourth-order stencils; with second-order ones the outer
    truncation error dominates on noncompact groups.
    """
    def br(a, b, h):
        return lambda y: poisson_bracket(p, a, b, y, h, order=4)

    total = (poisson_bracket(p, br(f, g, h_inner), k, x, h_outer, order=4)
             + poisson_bracket(p, br(g, k, h_inner), f, x, h_outer, order=4)
             + poisson_bracket(p, br(k, f, h_inner), g, x, h_outer, order=4))
    return abs(total)


def poisson_map_residual(src: BivectorProvider, dst: BivectorProvider, phi: Callable, x,
                         sign: float = 1.0, h: float = 1e-5) -> float:
    """max |dphi P_src dphi^T - sign P_dst(phi(x))|; sign = -1 tests anti-Poisson maps."""
    y = phi(x)
    jac = pushforward_in_chart(phi, src.manifold, x, dst.manifold, y, h=h)
    return float(np.abs(jac @ src.evaluate(x) @ jac.T - sign * dst.evaluate(y)).max())


def group_multiplicativity_residual(p: BivectorProvider, model: MatrixGroupModel, g, k,
                                    h: float = 1e-5) -> float:
    """pi(gk) against dL_g pi(k) + dR_k pi(g), translations differentiated in charts."""
    gm = GroupManifold(model)
    left = pushforward_in_chart(lambda y: g @ y, gm, k, gm, h=h)
    right = pushforward_in_chart(lambda y: y @ k, gm, g, gm, h=h)
    rhs = left @ p.evaluate(k) @ left.T + right @ p.evaluate(g) @ right.T
    return float(np.abs(p.evaluate(g @ k) - rhs).max())


def linearization_residual(p: BivectorProvider, bi: LieBialgebraData, model: MatrixGroupModel,
                           h: float = 1e-5, directions=None) -> float:
    """max |d_e pi (v) - delta(v)| over ``directions`` (default: the basis), d_e pi by central differences."""
    worst = 0.0
    for v in np.eye(model.dim) if directions is None else np.atleast_2d(directions):
        d = (p.evaluate(model.exp(h * v)) - p.evaluate(model.exp(-h * v))) / (2 * h)
        worst = max(worst, float(np.abs(d - cobracket(bi, v)).max()))
    return worst


def lie_derivative(p: BivectorProvider, field_fn: Callable, x, h: float = 1e-3, steps: int = 4) -> np.ndarray:
    """L_V pi at x = d/dt (Phi_-t)_* pi(Phi_t x) by flow pushforward differences."""
    m = p.manifold

    def pulled(t):
        y = rk4_flow(m, field_fn, x, t, steps)
        back = lambda z: rk4_flow(m, field_fn, z, -t, steps)
        jac = pushforward_in_chart(back, m, y, m, x, tol=1e-6)
        return jac @ p.evaluate(y) @ jac.T

    return (pulled(h) - pulled(-h)) / (2 * h)


def infinitesimal_action_residual(bi: LieBialgebraData, p: BivectorProvider, psi: Callable, xi, x,
                                  h: float = 1e-3) -> float:
    """max |L_{psi(xi)} pi - (psi ^ psi) delta(xi)| at x.

    ``psi(xi, y)`` returns the chart components of the fundamental field.
    """
    xi = np.asarray(xi, dtype=float)
    if not np.any(xi):
        return 0.0
    lhs = lie_derivative(p, lambda y: psi(xi, y), x, h=h)
    basis = np.column_stack([psi(e, x) for e in np.eye(bi.dim)])
    rhs = basis @ cobracket(bi, xi) @ basis.T
    return float(np.abs(lhs - rhs).max())


def flatten_point(x) -> np.ndarray:
    if isinstance(x, tuple):
        return np.concatenate([flatten_point(c) for c in x])
    return np.asarray(x, dtype=float).ravel()


def random_test_function(rng: np.random.Generator, size: int) -> Callable:
    """A smooth scalar function of the flattened point: linear plus a squared linear form."""
    a, b, c = rng.normal(size=size), rng.normal(size=size), rng.normal()

    def f(x):
        v = flatten_point(x)
        return float(a @ v + c * (b @ v) ** 2)

    return f
