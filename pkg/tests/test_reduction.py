import numpy as np
import pytest

from poisson_lift.algebra import LieAlgebraData, LieBialgebraData
from poisson_lift.charts import VectorSpace, pushforward_in_chart
from poisson_lift.groupoid import TransfPoint
from poisson_lift.lifted import double_action_reduction_scenario
from poisson_lift.reduction import (HopfTorusSlice, ReducedPairQuotient, annihilator, check_coisotropy,
                                    coisotropic_subgroup, coisotropy_residual, homogeneous_scenario,
                                    level_set_membership, pair_quotient_scenario, reduction_alt_check,
                                    subalgebra_residual)

HOMOGENEOUS_TOL = {"closure": 1e-9, "h_action": 1e-9, "projection_idempotent": 1e-9,
                   "projection_invariance": 1e-9, "product_compatibility": 1e-9, "twisted_on_H": 1e-9,
                   "orbit_in_kernel": 1e-6, "reduced_jacobi": 1e-4, "quotient_poisson_map": 1e-5,
                   "base_well_defined": 1e-9}


def test_annihilator_trivial_cases(su2):
    bi = su2.bialgebra
    assert annihilator(np.eye(3)).shape == (3, 0)
    assert coisotropy_residual(bi, np.eye(3)) == 0.0
    assert coisotropy_residual(bi, np.zeros((0, 3))) == 0.0
    perp = annihilator([[0.0, 0.0, 1.0]])
    assert np.abs(np.array([0.0, 0.0, 1.0]) @ perp).max() == 0.0 and perp.shape == (3, 2)
    with pytest.raises(ValueError):
        annihilator([[1.0, 0.0, 0.0], [2.0, 0.0, 0.0]])


def test_torus_is_coisotropic_and_subalgebra(su2):
    h = [[0.0, 0.0, 1.0]]
    assert check_coisotropy(su2.bialgebra, h).passed
    assert subalgebra_residual(su2.bialgebra, h) == 0.0
    assert subalgebra_residual(su2.bialgebra, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]) == pytest.approx(1.0)


def test_non_coisotropic_refused(su2):
    c = np.zeros((3, 3, 3))
    bi = LieBialgebraData(LieAlgebraData(c), su2.bialgebra.primal)
    assert not check_coisotropy(bi, [[1.0, 0.0, 0.0]]).passed


def test_level_set_membership(su2):
    lam, cs = su2.lifted, su2.subgroup
    g = lam.group.exp([0.2, -0.3, 0.4])
    assert level_set_membership(lam, cs, lam.groupoid.unit(g)) == (True, 0.0)
    inside = TransfPoint(cs.Hperp_model.exp([0.3, -0.6]), g)
    ok, d = level_set_membership(lam, cs, inside)
    assert ok and d <= 1e-12
    outside = TransfPoint(lam.gstar.exp([0.0, 0.0, 0.3]), g)
    ok, d = level_set_membership(lam, cs, outside)
    assert not ok and d == pytest.approx(0.3, rel=1e-12)


def test_hopf_slice_roundtrip_and_jacobian(su2):
    slc = HopfTorusSlice(su2.lifted, su2.subgroup)
    rng = np.random.default_rng(0)
    for _ in range(10):
        zeta = np.concatenate([rng.uniform(-0.7, 0.7, 2), rng.uniform(-0.5, 0.5, 2)])
        assert np.abs(slc.coordinates(slc.embed(zeta)) - zeta).max() <= 1e-12
        fd = pushforward_in_chart(slc.embed, VectorSpace(4), zeta, su2.groupoid.total)
        assert np.abs(fd - slc.embedding_jacobian(zeta)).max() <= 1e-8
    with pytest.raises(ValueError):
        slc.embed(np.array([0.0, 0.0, 0.8, 0.7]))


def test_homogeneous_scenario(su2):
    res = homogeneous_scenario(su2.lifted, su2.subgroup, su2.bialgebra, np.random.default_rng(1), samples=10)
    for key, tol in HOMOGENEOUS_TOL.items():
        assert res[key] <= tol, (key, res[key])


def test_homogeneous_requires_relative_completeness(su2):
    cs = su2.subgroup
    weak = coisotropic_subgroup(su2.bialgebra, su2.dm.g_model, su2.dm.gstar_model, cs.h_basis, False)
    with pytest.raises(ValueError):
        homogeneous_scenario(su2.lifted, weak, su2.bialgebra, np.random.default_rng(2), samples=2)


def test_pair_quotient(pair):
    res = pair_quotient_scenario(pair.morphism, pair.groupoid_config["momentum"], np.random.default_rng(3), 20)
    assert res["nondegenerate"] <= 1e8
    assert res["multiplicativity"] <= 1e-5
    assert res["base_bracket"] <= 1e-6
    assert res["target_anti_poisson"] <= 1e-6
    assert res["axioms"] <= 1e-10
    assert res["gauge_invariance"] <= 1e-9


def test_pair_reduced_base_brackets(pair):
    """R^4 / R for the flow of x1: x1 is a Casimir and {x2, y2} = 1 on the leaf x1 = 0."""
    pg = pair.groupoid
    shift = pair.lifted.base_act(pair.dm.g_model.exp([1.0]), np.zeros(4))[:, None]
    assert np.array_equal(shift[:, 0], [0.0, 1.0, 0.0, 0.0])
    rq = ReducedPairQuotient(pg, pair.groupoid_config["momentum"], shift)
    assert rq.base.dim == 3
    # invariant coordinates x1, x2, y2 and their brackets on R^4
    q = rq.B2[[0, 2, 3]]
    assert np.abs(rq.B2[1]).max() <= 1e-12
    expected = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, -1.0, 0.0]])
    assert np.abs(q @ rq.base_bivector.evaluate(None) @ q.T - expected).max() <= 1e-12
    assert np.linalg.matrix_rank(rq.base_bivector.evaluate(None)) == 2


def test_double_action_scenario(pair):
    res = double_action_reduction_scenario(pair.morphism, np.random.default_rng(4), samples=20)
    # M // G is the (x2, y2) plane; its pair groupoid has dimension 4
    assert res["reduced_dim"] == 4.0
    assert res["rank"] == 0.0 and res["level_set_agreement"] == 0.0
    for key in ("action_formula", "orbit_in_kernel", "slice_form", "subgroupoid"):
        assert res[key] <= 1e-9, key


def test_double_action_needs_pair_model(abelian):
    with pytest.raises(TypeError):
        double_action_reduction_scenario(abelian.morphism, np.random.default_rng(5), samples=1)


def test_K_m_comparison_not_computed():
    rep = reduction_alt_check()
    assert rep.status == "not-computed" and rep.succeeded and not rep.passed
