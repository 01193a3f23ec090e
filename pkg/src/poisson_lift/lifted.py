"""Lifted actions on the groupoid models, momentum maps and their identities.

Residual functions take explicit samples and return floats; suite
assembly and sampling live in :mod:`poisson_lift.suites`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.linalg import expm, null_space

from .charts import GroupManifold, VectorSpace, pushforward_in_chart
from .double import DoubleGroupModel
from .group import MatrixGroupModel
from .groupoid import (CotangentGroupoid, CotPoint, GroupoidModel, PairGroupoid, PairPoint,
                       TransformationGroupoid, TransfPoint)

PSI_STEP = 1e-4


@dataclass(eq=False)
class LiftedActionModel:
    """An action of G on a groupoid together with its momentum map J into G*."""

    name: str
    groupoid: GroupoidModel
    dm: DoubleGroupModel
    act: Callable
    J: Callable
    base_act: Callable

    @property
    def group(self) -> MatrixGroupModel:
        return self.dm.g_model

    @property
    def gstar(self) -> MatrixGroupModel:
        return self.dm.gstar_model

    def psi(self, xi, x, h: float = PSI_STEP) -> np.ndarray:
        """Fundamental field of xi at x by central differences along exp(t xi)."""
        xi = np.asarray(xi, dtype=float)
        tot = self.groupoid.total
        plus = self.act(self.group.exp(h * xi), x)
        minus = self.act(self.group.exp(-h * xi), x)
        return (tot.local(x, plus) - tot.local(x, minus)) / (2 * h)

    def twist(self, g, x):
        """g^{J(x)}, the right dressing of g by the momentum of x."""
        return self.dm.right_dressing_on_g(g, self.J(x))

    def coadjoint_momentum(self, x, xi) -> np.ndarray:
        """The g-vector entering the infinitesimal twisted identity, (Ad^{G*}_{J(x)})^T xi."""
        return self.gstar.adjoint(self.J(x)).T @ np.asarray(xi, dtype=float)


@dataclass(eq=False)
class ActionGroupoidMorphism:
    """Psi : G x M -> Sigma with s(Psi(g, m)) = m and t(Psi(g, m)) = g m."""

    Psi: Callable
    mu: Callable
    lam: LiftedActionModel = field(repr=False)


# ---------------------------------------------------------------- model constructors


def transf_lifted_action(tg: TransformationGroupoid) -> LiftedActionModel:
    dm = tg.dm

    def act(g, x):
        u2, g2 = dm.dress_g_on_gstar(g, x.u)
        return TransfPoint(u2, g2 @ x.g)

    return LiftedActionModel("transformation", tg, dm, act, lambda x: x.u, lambda g, m: g @ m)


def broken_twist_action(tg: TransformationGroupoid) -> LiftedActionModel:
    """Negative control: (^g u, g h) drops the dressing of g but keeps J a morphism."""
    dm = tg.dm

    def act(g, x):
        return TransfPoint(dm.left_dressing_on_gstar(g, x.u), g @ x.g)

    return LiftedActionModel("broken-twist", tg, dm, act, lambda x: x.u, lambda g, m: g @ m)


def cotangent_lift_action(cg: CotangentGroupoid, dm: DoubleGroupModel, action_generators) -> LiftedActionModel:
    """Cotangent lift of a linear action m -> exp(sum t_i A_i) m of an abelian G.

    The momentum is j(m, p)_i = p . A_i m, read into G* through exp.
    """
    gens = np.asarray(action_generators, dtype=float)

    def matrix(g):
        return expm(np.tensordot(dm.g_model.log(g), gens, axes=1))

    def act(g, x):
        a = matrix(g)
        return CotPoint(a @ x.m, np.linalg.solve(a.T, x.p))

    def J(x):
        return dm.gstar_model.exp(np.array([x.p @ a @ x.m for a in gens]))

    return LiftedActionModel("cotangent-lift", cg, dm, act, J, lambda g, m: matrix(g) @ m)


def trivial_action(gm: GroupoidModel, dm: DoubleGroupModel) -> LiftedActionModel:
    """The only hamiltonian action on a zero Poisson base: trivial action, mu = e."""
    e = dm.gstar_model.identity()
    return LiftedActionModel("trivial", gm, dm, lambda g, x: x, lambda x: e, lambda g, m: m)


def pair_diagonal_action(pg: PairGroupoid, dm: DoubleGroupModel, momentum) -> tuple[LiftedActionModel, ActionGroupoidMorphism]:
    """Diagonal action on M x M of the flow generated by a linear momentum mu(m) = K m.

    With s = m2 and s Poisson, the groupoid momentum is mu(s) - mu(t).
    """
    k = np.asarray(momentum, dtype=float)
    # fundamental field of xi: pi^#(K^T xi) = pi^T K^T xi, a constant vector
    shift = pg.pi.T @ k.T

    def base_act(g, m):
        return m + shift @ dm.g_model.log(g)

    def act(g, x):
        return PairPoint(base_act(g, x.m1), base_act(g, x.m2))

    def mu(m):
        return dm.gstar_model.exp(k @ m)

    def J(x):
        return dm.gstar_model.exp(k @ (x.m2 - x.m1))

    lam = LiftedActionModel("pair-diagonal", pg, dm, act, J, base_act)
    agm = ActionGroupoidMorphism(lambda g, m: PairPoint(base_act(g, m), np.array(m, dtype=float)), mu, lam)
    return lam, agm


def trivial_morphism(lam: LiftedActionModel) -> ActionGroupoidMorphism:
    e = lam.gstar.identity()
    return ActionGroupoidMorphism(lambda g, m: lam.groupoid.unit(m), lambda m: e, lam)


# ---------------------------------------------------------------- residuals


def _gdist(a, b) -> float:
    return float(np.abs(a - b).max())


def action_law_residual(lam: LiftedActionModel, g1, g2, x) -> float:
    return lam.groupoid.distance(lam.act(g1 @ g2, x), lam.act(g1, lam.act(g2, x)))


def identity_action_residual(lam: LiftedActionModel, x) -> float:
    return lam.groupoid.distance(lam.act(lam.group.identity(), x), x)


def unit_momentum_residual(lam: LiftedActionModel, m) -> float:
    return _gdist(lam.J(lam.groupoid.unit(m)), lam.gstar.identity())


def J_morphism_residual(lam: LiftedActionModel, x, y) -> float:
    return _gdist(lam.J(lam.groupoid.multiply(x, y)), lam.J(x) @ lam.J(y))


def equivariance_residual(lam: LiftedActionModel, g, x) -> float:
    return _gdist(lam.J(lam.act(g, x)), lam.dm.left_dressing_on_gstar(g, lam.J(x)))


def twisted_multiplicativity_residual(lam: LiftedActionModel, g, x, y) -> float:
    """Distance between g(x.y) and (g x).(g^{J(x)} y), including any composability gap."""
    gm = lam.groupoid
    lhs = lam.act(g, gm.multiply(x, y))
    gx, gy = lam.act(g, x), lam.act(lam.twist(g, x), y)
    gap = gm.composability_gap(gx, gy)
    return max(gap, gm.distance(lhs, gm._multiply(gx, gy)))


def infinitesimal_twisted_residual(lam: LiftedActionModel, xi, x, y, h: float = 1e-5) -> float:
    """psi(xi)_{xy} against dm(psi(xi)_x, psi(xi')_y) with xi' = (Ad^{G*}_{J(x)})^T xi.

    dm is applied through the composable-pair chart; the least-squares
    mismatch of the tangent pair is included in the residual.
    """
    gm = lam.groupoid
    tot = gm.total
    xi = np.asarray(xi, dtype=float)
    xy = gm.multiply(x, y)
    k, fam = gm.composable_family(x, y)
    pair_cols, prod_cols = [], []
    for e in np.eye(k):
        xp, yp = fam(h * e)
        xm, ym = fam(-h * e)
        pair_cols.append(np.concatenate([tot.local(x, xp) - tot.local(x, xm), tot.local(y, yp) - tot.local(y, ym)]) / (2 * h))
        prod_cols.append((tot.local(xy, gm.multiply(xp, yp)) - tot.local(xy, gm.multiply(xm, ym))) / (2 * h))
    t_pair, t_prod = np.column_stack(pair_cols), np.column_stack(prod_cols)
    v = np.concatenate([lam.psi(xi, x), lam.psi(lam.coadjoint_momentum(x, xi), y)])
    theta = np.linalg.lstsq(t_pair, v, rcond=None)[0]
    tangency = float(np.abs(t_pair @ theta - v).max())
    return max(tangency, float(np.abs(t_prod @ theta - lam.psi(xi, xy)).max()))


def hamiltonian_residual(lam: LiftedActionModel, xi, x) -> float:
    """psi(xi)_x against Pi^#(J^* xi^R); xi^R has chart components xi on G*."""
    xi = np.asarray(xi, dtype=float)
    gm = lam.groupoid
    dj = pushforward_in_chart(lam.J, gm.total, x, GroupManifold(lam.gstar))
    return float(np.abs(lam.psi(xi, x) - gm.total_bivector.evaluate(x).T @ (dj.T @ xi)).max())


def prop_general_residuals(lam: LiftedActionModel, g, x) -> dict[str, float]:
    """Induced identities for units, source, target, inverse and the odot action."""
    gm = lam.groupoid
    b = gm.base.distance
    gx = lam.act(g, x)
    gj = lam.twist(g, x)
    m = gm.target(x)
    odot = gm.inverse(lam.act(g, gm.inverse(x)))
    return {
        "unit": gm.distance(lam.act(g, gm.unit(m)), gm.unit(lam.base_act(g, m))),
        "target": b(gm.target(gx), lam.base_act(g, gm.target(x))),
        "source": b(gm.source(gx), lam.base_act(gj, gm.source(x))),
        "inverse": gm.distance(gm.inverse(gx), lam.act(gj, gm.inverse(x))),
        "odot": max(b(gm.source(odot), lam.base_act(g, gm.source(x))),
                    gm.distance(gm.inverse(lam.act(g, gm.inverse(gm.unit(m)))), gm.unit(lam.base_act(g, m)))),
    }


def exactness_residual(agm: ActionGroupoidMorphism, x) -> float:
    """J(x) against mu(s(x)) mu(t(x))^-1 (s is the Poisson end of every model)."""
    gm = agm.lam.groupoid
    return _gdist(agm.lam.J(x), agm.mu(gm.source(x)) @ np.linalg.inv(agm.mu(gm.target(x))))


def twisted_inner_action(agm: ActionGroupoidMorphism, g, x):
    """Psi(g, t(x)) . x . Psi(g^{J(x)}, s(x))^-1."""
    lam = agm.lam
    gm = lam.groupoid
    left = agm.Psi(g, gm.target(x))
    right = gm.inverse(agm.Psi(lam.twist(g, x), gm.source(x)))
    return gm.multiply(gm.multiply(left, x), right)


def twisted_inner_residual(agm: ActionGroupoidMorphism, g, x) -> float:
    return agm.lam.groupoid.distance(twisted_inner_action(agm, g, x), agm.lam.act(g, x))


def morphism_law_residual(agm: ActionGroupoidMorphism, g, k, m) -> float:
    """Psi(gk, m) = Psi(g, k m) Psi(k, m) and Psi(e, m) = unit(m)."""
    lam = agm.lam
    gm = lam.groupoid
    law = gm.distance(agm.Psi(g @ k, m), gm.multiply(agm.Psi(g, lam.base_act(k, m)), agm.Psi(k, m)))
    unit = gm.distance(agm.Psi(lam.group.identity(), m), gm.unit(m))
    return max(law, unit)


def algebroid_morphism_residual(agm: ActionGroupoidMorphism, xi, m, h: float = PSI_STEP) -> float:
    """d/dt Psi(exp(t xi), m) lies in ker ds and has anchor pi^#(mu^* xi^R).

    Returns the largest of the source component and the anchor mismatch.
    """
    lam = agm.lam
    gm = lam.groupoid
    xi = np.asarray(xi, dtype=float)
    unit = gm.unit(m)
    v = (gm.total.local(unit, agm.Psi(lam.group.exp(h * xi), m))
         - gm.total.local(unit, agm.Psi(lam.group.exp(-h * xi), m))) / (2 * h)
    ds = pushforward_in_chart(gm.source, gm.total, unit, gm.base)
    dt = pushforward_in_chart(gm.target, gm.total, unit, gm.base)
    dmu = pushforward_in_chart(agm.mu, gm.base, m, GroupManifold(lam.gstar))
    anchor = gm.base_bivector.evaluate(m).T @ (dmu.T @ xi)
    return float(max(np.abs(ds @ v).max(), np.abs(dt @ v - anchor).max()))


# ---------------------------------------------------------------- double action scenario


def double_action(agm: ActionGroupoidMorphism, g1, g2, x):
    """(g1, g2) . x = Psi(g1, t(x)) . x . Psi(g2^{J(x)}, s(x))^-1."""
    lam = agm.lam
    gm = lam.groupoid
    left = agm.Psi(g1, gm.target(x))
    right = gm.inverse(agm.Psi(lam.twist(g2, x), gm.source(x)))
    return gm.multiply(gm.multiply(left, x), right)


def double_momentum(agm: ActionGroupoidMorphism, x):
    """(mu(t(x))^-1, mu(s(x))), whose level set at (e, e) is J^-1(e) over mu^-1(e)."""
    gm = agm.lam.groupoid
    return np.linalg.inv(agm.mu(gm.target(x))), agm.mu(gm.source(x))


def double_action_reduction_scenario(agm: ActionGroupoidMorphism, rng, samples: int = 50,
                                     tol: float = 1e-9) -> dict[str, float]:
    """Checks of the (G x G)-reduction of a pair groupoid with an abelian G and linear mu.

    Level-set points are produced by zeroing mu at both ends; the slice
    fixes the conjugate coordinates of mu to zero at both ends.
    """
    lam = agm.lam
    pg = lam.groupoid
    if not isinstance(pg, PairGroupoid):
        raise TypeError("the double-action scenario is defined for the pair model")
    k_dim = lam.group.dim
    e = lam.gstar.identity()
    n2 = pg.base.dim
    kmat = np.array([lam.gstar.log(agm.mu(v)) for v in np.eye(n2)]).T  # mu(m) = exp(K m)
    shift = np.column_stack([lam.base_act(lam.group.exp(v), np.zeros(n2)) for v in np.eye(k_dim)])
    # orthogonal projector killing mu; the slice also kills the orbit directions
    proj_mu = np.eye(n2) - np.linalg.pinv(kmat) @ kmat
    slice_basis = null_space(np.vstack([kmat, shift.T]))

    def on_level(m):
        return proj_mu @ m

    out = {"action_formula": 0.0, "level_set_agreement": 0.0, "rank": 0.0,
           "orbit_in_kernel": 0.0, "slice_form": 0.0, "subgroupoid": 0.0}
    pi_tot = pg.total_bivector.evaluate(None)
    omega = np.linalg.inv(pi_tot)
    for i in range(samples):
        x = pg.sample_point(rng)
        g1, g2 = lam.group.random_element(rng), lam.group.random_element(rng)
        expect = PairPoint(lam.base_act(g1, x.m1), lam.base_act(lam.twist(g2, x), x.m2))
        out["action_formula"] = max(out["action_formula"], pg.distance(double_action(agm, g1, g2, x), expect))
        # membership agreement on a mix of level-set and generic points
        if i % 2 == 0:
            x = PairPoint(on_level(x.m1), on_level(x.m2))
        mt, ms = double_momentum(agm, x)
        in_bar = max(_gdist(mt, e), _gdist(ms, e)) <= tol
        in_j = _gdist(lam.J(x), e) <= tol and _gdist(agm.mu(pg.target(x)), e) <= tol
        out["level_set_agreement"] = max(out["level_set_agreement"], float(in_bar != in_j))
        if i % 2 == 0:
            cons = lambda z: np.concatenate([lam.gstar.log(agm.mu(z.m1)), lam.gstar.log(agm.mu(z.m2))])
            jac = pushforward_in_chart(cons, pg.total, x, VectorSpace(2 * k_dim))
            rank = np.linalg.matrix_rank(jac, tol=1e-8)
            out["rank"] = max(out["rank"], abs((pg.total.dim - rank) - (pg.total.dim - 2 * k_dim)))
            # orbit directions of G x G at x lie in the kernel of omega restricted to the level set
            level_tangent = null_space(jac)
            orbit = np.column_stack([np.concatenate([shift[:, a], np.zeros(n2)]) for a in range(k_dim)]
                                    + [np.concatenate([np.zeros(n2), shift[:, a]]) for a in range(k_dim)])
            out["orbit_in_kernel"] = max(out["orbit_in_kernel"], float(np.abs(orbit.T @ omega @ level_tangent).max()))
    # slice form: restriction of omega to the slice in both factors, compared with the pair structure of M//G
    emb = np.block([[slice_basis, np.zeros_like(slice_basis)], [np.zeros_like(slice_basis), slice_basis]])
    reduced_omega = emb.T @ omega @ emb
    reduced_pi = np.linalg.inv(reduced_omega)
    base_reduced = slice_basis.T @ pg.pi @ slice_basis
    expected = np.block([[-base_reduced, np.zeros_like(base_reduced)], [np.zeros_like(base_reduced), base_reduced]])
    out["slice_form"] = float(np.abs(reduced_pi - expected).max())
    out["reduced_dim"] = float(reduced_omega.shape[0])
    # products of slice points stay in the slice
    for _ in range(samples):
        a, b, c = (slice_basis @ rng.uniform(-0.7, 0.7, slice_basis.shape[1]) for _ in range(3))
        z = pg.multiply(PairPoint(a, b), PairPoint(b, c))
        resid = max(np.abs(kmat @ z.m1).max(), np.abs(kmat @ z.m2).max(),
                    np.abs(shift.T @ z.m1).max(), np.abs(shift.T @ z.m2).max())
        out["subgroupoid"] = max(out["subgroupoid"], float(resid))
    return out

