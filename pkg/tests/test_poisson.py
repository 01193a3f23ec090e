import numpy as np
import pytest
from scipy.linalg import block_diag

from poisson_lift.algebra import LieAlgebraData, LieBialgebraData, cobracket
from poisson_lift.charts import GroupManifold, ProductManifold, VectorSpace
from poisson_lift.poisson import (BivectorError, BivectorProvider, coboundary_bivector, constant_bivector,
                                  group_multiplicativity_residual, infinitesimal_action_residual,
                                  jacobi_identity_residual, linearization_residual, poisson_bracket,
                                  poisson_map_residual, random_test_function, zero_bivector)

SYMPLECTIC_R2 = np.array([[0.0, 1.0], [-1.0, 0.0]])
coord = lambda i: (lambda x: float(np.asarray(x)[i]))


@pytest.fixture(scope="module")
def su2_pi():
    from poisson_lift import load_example
    ex = load_example("su2_standard")
    return ex, coboundary_bivector(ex.bialgebra, ex.dm.g_model)


def test_two_routes_agree(su2_pi):
    ex, pi = su2_pi
    rng = np.random.default_rng(0)
    for _ in range(50):
        g = ex.dm.g_model.random_element(rng)
        assert np.abs(pi.evaluate(g) - ex.dm.dressing_bivector(g)).max() <= 1e-12


def test_vanishes_at_identity(su2_pi):
    ex, pi = su2_pi
    assert np.abs(pi.evaluate(np.eye(4))).max() <= 1e-15


def test_multiplicativity_fd_and_closed_form(su2_pi):
    """FD translations against the chart formula pi(gk) = Ad_g pi(k) Ad_g^T + pi(g)."""
    ex, pi = su2_pi
    m = ex.dm.g_model
    rng = np.random.default_rng(1)
    for _ in range(100):
        g, k = m.random_element(rng), m.random_element(rng)
        assert group_multiplicativity_residual(pi, m, g, k) <= 1e-8
        a = m.adjoint(g)
        assert np.abs(pi.evaluate(g @ k) - a @ pi.evaluate(k) @ a.T - pi.evaluate(g)).max() <= 1e-12


def test_linearization_is_cobracket(su2_pi):
    ex, pi = su2_pi
    assert linearization_residual(pi, ex.bialgebra, ex.dm.g_model) <= 1e-6


def test_bracket_trivial_cases(su2_pi):
    ex, pi = su2_pi
    rng = np.random.default_rng(2)
    f = random_test_function(rng, 16)
    g = ex.dm.g_model.random_element(rng)
    assert abs(poisson_bracket(pi, f, f, g)) <= 1e-12
    z = zero_bivector(GroupManifold(ex.dm.g_model))
    assert poisson_bracket(z, f, random_test_function(rng, 16), g) == 0.0


def test_constant_symplectic_bracket():
    p = constant_bivector(VectorSpace(2), SYMPLECTIC_R2)
    assert abs(poisson_bracket(p, coord(0), coord(1), np.array([0.3, -1.2])) - 1.0) <= 1e-9


def test_jacobi_trivial_and_constant():
    rng = np.random.default_rng(3)
    fs = [random_test_function(rng, 2) for _ in range(3)]
    x = np.array([0.2, 0.5])
    assert jacobi_identity_residual(zero_bivector(VectorSpace(2)), x, *fs) == 0.0
    assert jacobi_identity_residual(constant_bivector(VectorSpace(2), SYMPLECTIC_R2), x, *fs) <= 1e-5


def test_jacobi_su2_50_points(su2_pi):
    ex, pi = su2_pi
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(50):
        fs = [random_test_function(rng, 16) for _ in range(3)]
        worst = max(worst, jacobi_identity_residual(pi, ex.dm.g_model.random_element(rng), *fs))
    assert worst <= 1e-4


def test_jacobi_detects_non_poisson_tensor():
    # {x1,x2} = x3, {x2,x3} = x2 has Jacobiator x3 on the coordinate functions
    def raw(x):
        return np.array([[0.0, x[2], 0.0], [-x[2], 0.0, x[1]], [0.0, -x[1], 0.0]])
    p = BivectorProvider(VectorSpace(3), raw)
    x = np.array([0.1, 0.4, 0.7])
    assert jacobi_identity_residual(p, x, coord(0), coord(1), coord(2)) == pytest.approx(0.7, rel=1e-6)


def test_jacobi_detects_corrupted_group_bivector(su2_pi):
    ex, pi = su2_pi
    m = ex.dm.g_model
    # a right-invariant term whose Schouten square does not cancel
    s = np.array([[0.0, 0.0, 0.5], [0.0, 0.0, 0.0], [-0.5, 0.0, 0.0]])
    bent = BivectorProvider(pi.manifold, lambda g: pi.raw(g) + s)
    rng = np.random.default_rng(5)
    fs = [random_test_function(rng, 16) for _ in range(3)]
    assert jacobi_identity_residual(bent, m.random_element(rng), *fs) > 1e-2


def test_bivector_guards():
    with pytest.raises(BivectorError):
        BivectorProvider(VectorSpace(2), lambda x: np.eye(3)).evaluate(np.zeros(2))
    with pytest.raises(BivectorError):
        BivectorProvider(VectorSpace(2), lambda x: np.ones((2, 2))).evaluate(np.zeros(2))


def test_poisson_map_identity_and_sign(su2_pi):
    ex, pi = su2_pi
    g = ex.dm.g_model.random_element(np.random.default_rng(6))
    assert poisson_map_residual(pi, pi, lambda y: y, g) <= 1e-9
    anti = poisson_map_residual(pi, pi, lambda y: y, g, sign=-1.0)
    assert anti == pytest.approx(2 * np.abs(pi.evaluate(g)).max(), rel=1e-6)


def test_multiplication_is_poisson(su2_pi):
    ex, pi = su2_pi
    m = ex.dm.g_model
    gm = GroupManifold(m)
    prod = BivectorProvider(ProductManifold([gm, gm]), lambda x: block_diag(pi.evaluate(x[0]), pi.evaluate(x[1])))
    rng = np.random.default_rng(7)
    worst = max(poisson_map_residual(prod, pi, lambda x: x[0] @ x[1], (m.random_element(rng), m.random_element(rng)))
                for _ in range(100))
    assert worst <= 1e-7


def test_infinitesimal_action_abelian_translation(abelian):
    p = constant_bivector(VectorSpace(2), SYMPLECTIC_R2)
    psi = lambda xi, y: np.asarray(xi, dtype=float)
    assert infinitesimal_action_residual(abelian.bialgebra, p, psi, [0.0, 0.0], np.zeros(2)) == 0.0
    assert infinitesimal_action_residual(abelian.bialgebra, p, psi, [0.3, -0.5], np.array([0.1, 0.2])) <= 1e-5


def test_left_translation_is_infinitesimal_poisson_action(su2_pi):
    ex, pi = su2_pi
    m = ex.dm.g_model
    rng = np.random.default_rng(8)
    worst = max(infinitesimal_action_residual(ex.bialgebra, pi, lambda xi, y: xi, rng.uniform(-0.7, 0.7, 3),
                                              m.random_element(rng)) for _ in range(10))
    assert worst <= 1e-4


def test_left_translation_not_poisson_without_cobracket_term(su2_pi):
    """Dropping the (psi ^ psi) delta term leaves a residual of the size of delta."""
    ex, pi = su2_pi
    flat = LieBialgebraData(ex.bialgebra.primal, LieAlgebraData(np.zeros((3, 3, 3))))
    xi = np.array([1.0, 0.0, 0.0])
    g = ex.dm.g_model.exp([0.2, 0.1, -0.3])
    assert infinitesimal_action_residual(flat, pi, lambda v, y: v, xi, g) > 0.1
    assert np.abs(cobracket(ex.bialgebra, xi)).max() == 1.0
