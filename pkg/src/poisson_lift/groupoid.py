"""Closed-form symplectic groupoid models and their residual checks.

Composition ``x . y`` requires ``s(x) = t(y)``. Every model places the
Poisson source map first: ``s`` is Poisson and ``t`` anti-Poisson for the
total bivector.
"""
from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np
from scipy.linalg import block_diag, null_space

from .charts import GroupManifold, Manifold, ProductManifold, VectorSpace
from .double import DoubleGroupModel
from .poisson import BivectorProvider, constant_bivector, poisson_map_residual, zero_bivector

COMPOSABILITY_TOL = 1e-9


class CompositionError(ValueError):
    """The pair is not composable within tolerance."""


class TransfPoint(NamedTuple):
    u: np.ndarray
    g: np.ndarray


class PairPoint(NamedTuple):
    m1: np.ndarray
    m2: np.ndarray


class CotPoint(NamedTuple):
    m: np.ndarray
    p: np.ndarray


class GroupoidModel:
    """Interface shared by the groupoid models.

    Subclasses provide the structure maps, a sampler for base points and
    ``fiber_point(x, m, theta)``: a point with source ``m`` whose fiber
    coordinates are those of ``x`` shifted by ``theta``. That parametrizes
    composable pairs exactly, without rejection sampling.
    """

    name: str
    total: Manifold
    base: Manifold
    total_bivector: BivectorProvider
    base_bivector: BivectorProvider
    composability_tol: float = COMPOSABILITY_TOL

    def source(self, x):
        raise NotImplementedError

    def target(self, x):
        raise NotImplementedError

    def _multiply(self, x, y):
        raise NotImplementedError

    def inverse(self, x):
        raise NotImplementedError

    def unit(self, m):
        raise NotImplementedError

    def sample_base(self, rng):
        raise NotImplementedError

    def fiber_point(self, x, m, theta):
        raise NotImplementedError

    @property
    def fiber_dim(self) -> int:
        return self.total.dim - self.base.dim

    def composability_gap(self, x, y) -> float:
        return self.base.distance(self.source(x), self.target(y))

    def multiply(self, x, y):
        gap = self.composability_gap(x, y)
        if gap > self.composability_tol:
            raise CompositionError(f"s(x) and t(y) differ by {gap:.3e}")
        return self._multiply(x, y)

    def distance(self, x, y) -> float:
        return self.total.distance(x, y)

    def sample_with_source(self, rng, m, scale: float = 0.7):
        return self.fiber_point(self.unit(m), m, rng.uniform(-scale, scale, self.fiber_dim))

    def sample_point(self, rng):
        return self.sample_with_source(rng, self.sample_base(rng))

    def sample_composable(self, rng):
        y = self.sample_point(rng)
        return self.sample_with_source(rng, self.target(y)), y

    def sample_triple(self, rng):
        z = self.sample_point(rng)
        y = self.sample_with_source(rng, self.target(z))
        return self.sample_with_source(rng, self.target(y)), y, z

    def composable_family(self, x, y) -> tuple[int, Callable]:
        """Chart of the composable pairs near (x, y): theta -> (x', y')."""
        d = self.total.dim

        def fam(theta):
            y2 = self.total.chart(y, theta[:d])
            return self.fiber_point(x, self.target(y2), theta[d:]), y2

        return d + self.fiber_dim, fam


def _fiber_shift(x_fiber, theta):
    return x_fiber + theta


# ---------------------------------------------------------------- transformation


def heisenberg_double_bivector(dm: DoubleGroupModel, sign: int = 1) -> BivectorProvider:
    """Bivector on G* x G transported from D through (u, g) -> u g.

    On D, in right-trivialized coefficients, P_D(d) = (Q + sign Ad_d Q Ad_d^T)/2
    with Q the matrix of <R . , .> for R = P_g - P_g*. The chart (a, b) of
    (exp(a) u, exp(b) g) maps to the D coefficients a + Ad_u b.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    n = dm.n
    z, i = np.zeros((n, n)), np.eye(n)
    q = np.block([[z, -i], [i, z]])
    manifold = ProductManifold([GroupManifold(dm.gstar_model), GroupManifold(dm.g_model)], TransfPoint)

    def raw(x):
        ad_u = dm.adjoint_d(x.u)
        ad_d = dm.adjoint_d(x.u @ x.g)
        jac = np.zeros((2 * n, 2 * n))
        jac[n:, :n] = i
        jac[:, n:] = ad_u[:, :n]
        pd = 0.5 * (q + sign * ad_d @ q @ ad_d.T)
        ji = np.linalg.inv(jac)
        return ji @ pd @ ji.T

    return BivectorProvider(manifold, raw, "HEISENBERG_DOUBLE", {"sign": sign})


class TransformationGroupoid(GroupoidModel):
    """G* x G over G: s(u,g) = g, t(u,g) = ^u g, (u1,g1)(u2,g2) = (u1 u2, g2)."""

    def __init__(self, dm: DoubleGroupModel, sign: int = 1, require_complete: bool = True):
        if require_complete and not dm.complete:
            raise ValueError("the global G* x G model needs a complete Poisson-Lie group")
        self.dm = dm
        self.name = "transformation"
        self.total = ProductManifold([GroupManifold(dm.gstar_model), GroupManifold(dm.g_model)], TransfPoint)
        self.base = GroupManifold(dm.g_model)
        self.sign = sign
        self.total_bivector = heisenberg_double_bivector(dm, sign)
        self.base_bivector = BivectorProvider(self.base, dm.dressing_bivector, "CUSTOM", {"source": "dressing"})

    def source(self, x):
        return x.g

    def target(self, x):
        return self.dm.left_dressing_on_g(x.u, x.g)

    def _multiply(self, x, y):
        return TransfPoint(x.u @ y.u, y.g)

    def inverse(self, x):
        return TransfPoint(np.linalg.inv(x.u), self.target(x))

    def unit(self, m):
        return TransfPoint(self.dm.gstar_model.identity(), m)

    def sample_base(self, rng):
        return self.dm.g_model.random_element(rng)

    def fiber_point(self, x, m, theta):
        return TransfPoint(self.dm.gstar_model.exp(theta) @ x.u, m)


# ---------------------------------------------------------------- pair


class PairGroupoid(GroupoidModel):
    """M x M for a constant Poisson bivector on R^2n: s = m2, t = m1, Pi = (-pi) + pi."""

    def __init__(self, base_bivector):
        pi = np.asarray(base_bivector, dtype=float)
        n = pi.shape[0]
        self.name = "pair"
        self.pi = pi
        self.base = VectorSpace(n)
        self.total = ProductManifold([VectorSpace(n), VectorSpace(n)], PairPoint)
        self.base_bivector = constant_bivector(self.base, pi)
        self.total_bivector = constant_bivector(self.total, block_diag(-pi, pi))

    def source(self, x):
        return x.m2

    def target(self, x):
        return x.m1

    def _multiply(self, x, y):
        return PairPoint(x.m1, y.m2)

    def inverse(self, x):
        return PairPoint(x.m2, x.m1)

    def unit(self, m):
        return PairPoint(np.array(m, dtype=float), np.array(m, dtype=float))

    def sample_base(self, rng, scale: float = 0.7):
        return rng.uniform(-scale, scale, self.base.dim)

    def fiber_point(self, x, m, theta):
        return PairPoint(x.m1 + theta, np.array(m, dtype=float))


# ---------------------------------------------------------------- cotangent


class CotangentGroupoid(GroupoidModel):
    """T*R^n with fiberwise addition over the zero Poisson structure.

    The canonical bivector in (m, p) order is [[0, -I], [I, 0]], so that
    the fields pi^#(dH) are the usual Hamilton equations.
    """

    def __init__(self, n: int):
        self.name = "cotangent"
        self.n = n
        self.base = VectorSpace(n)
        self.total = ProductManifold([VectorSpace(n), VectorSpace(n)], CotPoint)
        z, i = np.zeros((n, n)), np.eye(n)
        self.base_bivector = zero_bivector(self.base)
        self.total_bivector = constant_bivector(self.total, np.block([[z, -i], [i, z]]))

    def source(self, x):
        return x.m

    def target(self, x):
        return x.m

    def _multiply(self, x, y):
        return CotPoint(x.m, x.p + y.p)

    def inverse(self, x):
        return CotPoint(x.m, -x.p)

    def unit(self, m):
        return CotPoint(np.array(m, dtype=float), np.zeros(self.n))

    def sample_base(self, rng, scale: float = 0.7):
        return rng.uniform(-scale, scale, self.n)

    def fiber_point(self, x, m, theta):
        return CotPoint(np.array(m, dtype=float), x.p + theta)


# ---------------------------------------------------------------- checks


def axiom_residuals(gm: GroupoidModel, rng) -> dict[str, float]:
    """Associativity, unit, inverse and s/t coherence residuals at one random sample."""
    x, y, z = gm.sample_triple(rng)
    d = gm.distance
    b = gm.base.distance
    xy = gm.multiply(x, y)
    yz = gm.multiply(y, z)
    m = gm.sample_base(rng)
    return {
        "associativity": d(gm.multiply(xy, z), gm.multiply(x, yz)),
        "unit": max(d(gm.multiply(gm.unit(gm.target(x)), x), x), d(gm.multiply(x, gm.unit(gm.source(x))), x)),
        "inverse": max(d(gm.multiply(x, gm.inverse(x)), gm.unit(gm.target(x))),
                       d(gm.multiply(gm.inverse(x), x), gm.unit(gm.source(x)))),
        "source_target": max(b(gm.source(xy), gm.source(y)), b(gm.target(xy), gm.target(x))),
        "unit_section": max(b(gm.source(gm.unit(m)), m), b(gm.target(gm.unit(m)), m)),
    }


def source_poisson_residual(gm: GroupoidModel, x) -> float:
    return poisson_map_residual(gm.total_bivector, gm.base_bivector, gm.source, x, sign=1.0)


def target_anti_poisson_residual(gm: GroupoidModel, x) -> float:
    return poisson_map_residual(gm.total_bivector, gm.base_bivector, gm.target, x, sign=-1.0)


def nondegeneracy(gm: GroupoidModel, x) -> float:
    return float(abs(np.linalg.det(gm.total_bivector.evaluate(x))))


def check_multiplicativity(gm: GroupoidModel, x, y, h: float = 1e-5, rank_tol: float = 1e-6) -> float:
    """Coisotropy of graph(m) inside Sigma x Sigma x (Sigma, -Pi).

    The tangent space of the graph is spanned by finite differences of the
    composable-pair chart; its annihilator N gives the residual max |N^T Pi N|.
    """
    xy = gm.multiply(x, y)
    k, fam = gm.composable_family(x, y)
    tot = gm.total

    def graph_coords(theta):
        x2, y2 = fam(theta)
        return np.concatenate([tot.local(x, x2), tot.local(y, y2), tot.local(xy, gm.multiply(x2, y2))])

    cols = []
    for e in np.eye(k):
        cols.append((graph_coords(h * e) - graph_coords(-h * e)) / (2 * h))
    tangent = np.column_stack(cols)
    sv = np.linalg.svd(tangent, compute_uv=False)
    if sv[-1] < rank_tol * sv[0]:
        raise ValueError(f"graph chart is rank deficient (smallest singular value {sv[-1]:.2e})")
    conormal = null_space(tangent.T)
    big = block_diag(gm.total_bivector.evaluate(x), gm.total_bivector.evaluate(y),
                     -gm.total_bivector.evaluate(xy))
    return float(np.abs(conormal.T @ big @ conormal).max())


def heisenberg_sign_scan(dm: DoubleGroupModel, rng, samples: int = 20, tol_poisson: float = 1e-6,
                         tol_mult: float = 1e-5, det_floor: float = 1e-8) -> dict:
    """Run the Poisson-map, multiplicativity and nondegeneracy checks for both signs.

    Returns per-sign residuals and the accepted sign. Raises if neither passes.
    """
    seed = int(rng.integers(2 ** 63))
    results = {}
    for sign in (1, -1):
        gm = TransformationGroupoid(dm, sign)
        r = np.random.default_rng(seed)
        s_res, t_res, m_res, dets = [], [], [], []
        for _ in range(samples):
            x = gm.sample_point(r)
            s_res.append(source_poisson_residual(gm, x))
            t_res.append(target_anti_poisson_residual(gm, x))
            dets.append(nondegeneracy(gm, x))
            m_res.append(check_multiplicativity(gm, *gm.sample_composable(r)))
        entry = {
            "source_poisson": max(s_res),
            "target_anti_poisson": max(t_res),
            "multiplicativity": max(m_res),
            "min_abs_det": min(dets),
        }
        entry["passed"] = (entry["source_poisson"] <= tol_poisson and entry["target_anti_poisson"] <= tol_poisson
                           and entry["multiplicativity"] <= tol_mult and entry["min_abs_det"] > det_floor)
        results[sign] = entry
    passing = [s for s, e in results.items() if e["passed"]]
    if not passing:
        raise ValueError(f"no Heisenberg sign passes: {results}")
    results["accepted"] = passing[0] if len(passing) == 1 else None
    return results
