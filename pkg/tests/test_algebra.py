import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from poisson_lift.algebra import (LieAlgebraData, LieBialgebraData, bracket, build_double, check_double,
                                  check_jacobi, coboundary_residual, cobracket, cocycle_residual,
                                  double_constants, duality_residual, jacobi_residual,
                                  pairing_invariance_residual)
from poisson_lift.reduction import coisotropy_residual

EPS = np.zeros((3, 3, 3))
for (i, j, k), s in {(0, 1, 2): 1, (1, 2, 0): 1, (2, 0, 1): 1, (0, 2, 1): -1, (2, 1, 0): -1, (1, 0, 2): -1}.items():
    EPS[i, j, k] = s


def su2_constants():
    # [e_i, e_j] = eps_ijk e_k stored as c[k, i, j]
    return EPS.transpose(2, 0, 1).copy()


def sb2_constants():
    c = np.zeros((3, 3, 3))
    c[0, 0, 2], c[0, 2, 0] = 1, -1
    c[1, 1, 2], c[1, 2, 1] = 1, -1
    return c


def aff1_constants():
    c = np.zeros((2, 2, 2))
    c[1, 0, 1], c[1, 1, 0] = 1, -1
    return c


def brute_jacobi(c):
    """Cyclic sum with explicit loops over basis triples."""
    n = c.shape[0]
    alg = LieAlgebraData(c)
    eye = np.eye(n)
    worst = 0.0
    for i in range(n):
        for j in range(n):
            for k in range(n):
                a, b, d = eye[i], eye[j], eye[k]
                s = (bracket(alg, bracket(alg, a, b), d) + bracket(alg, bracket(alg, b, d), a)
                     + bracket(alg, bracket(alg, d, a), b))
                worst = max(worst, np.abs(s).max())
    return worst


vec3 = arrays(float, 3, elements=st.floats(-5, 5))


def test_su2_bracket_frozen():
    alg = LieAlgebraData(su2_constants())
    assert np.array_equal(bracket(alg, [1, 0, 0], [0, 1, 0]), [0, 0, 1])
    assert np.array_equal(bracket(alg, [0, 1, 0], [0, 0, 1]), [1, 0, 0])


def test_aff1_bracket_frozen(aff1):
    assert np.array_equal(bracket(aff1.bialgebra.primal, [1, 0], [0, 1]), [0, 1])


def test_shipped_su2_constants_are_levi_civita(su2):
    assert np.array_equal(su2.bialgebra.primal.c, su2_constants())
    assert np.array_equal(su2.bialgebra.dual.c, sb2_constants())


@given(vec3)
def test_bracket_self_vanishes(x):
    alg = LieAlgebraData(su2_constants())
    assert np.abs(bracket(alg, x, x)).max() <= 1e-12 * max(1.0, np.abs(x).max() ** 2)


@given(vec3, vec3)
def test_bracket_matches_cross_product(x, y):
    # so(3) oracle: [x, y] = x cross y for the Levi-Civita constants
    alg = LieAlgebraData(su2_constants())
    assert np.allclose(bracket(alg, x, y), np.cross(x, y), atol=1e-12)


@given(arrays(float, (2, 2, 2), elements=st.floats(-3, 3)))
def test_jacobi_vacuous_in_dim_two(raw):
    c = raw - raw.transpose(0, 2, 1)
    assert jacobi_residual(c) <= 1e-12


def test_jacobi_su2_and_two_routes():
    c = su2_constants()
    assert jacobi_residual(c) == 0.0
    assert brute_jacobi(c) == 0.0
    assert check_jacobi(LieAlgebraData(c)).passed


def test_jacobi_detects_perturbation():
    rng = np.random.default_rng(7)
    noise = rng.normal(size=(3, 3, 3))
    c = su2_constants() + 0.1 * (noise - noise.transpose(0, 2, 1))
    fast, slow = jacobi_residual(c), brute_jacobi(c)
    assert fast > 1e-3
    assert fast == pytest.approx(slow, rel=1e-12)
    assert not check_jacobi(LieAlgebraData(c)).passed


def test_constants_shape_refused():
    with pytest.raises(ValueError):
        LieAlgebraData(np.zeros((2, 3, 3)))


def test_cobracket_zero_dual():
    bi = LieBialgebraData(LieAlgebraData(su2_constants()), LieAlgebraData(np.zeros((3, 3, 3))))
    assert not np.any(cobracket(bi, [1.0, -2.0, 3.0]))
    assert cocycle_residual(bi) == 0.0


def test_cobracket_aff1_frozen(aff1):
    d = cobracket(aff1.bialgebra, [0.0, 1.0])
    assert np.array_equal(d, [[0.0, 1.0], [-1.0, 0.0]])
    # duality oracle: the array is the transpose of the dual constants at index 1
    assert np.array_equal(d, aff1.bialgebra.dual.c[1])
    assert not np.any(cobracket(aff1.bialgebra, [0.0, 0.0]))


def test_su2_cobracket_frozen(su2):
    bi = su2.bialgebra
    e1, e2, e3 = np.eye(3)
    assert np.array_equal(cobracket(bi, e1), [[0, 0, 1], [0, 0, 0], [-1, 0, 0]])
    assert np.array_equal(cobracket(bi, e2), [[0, 0, 0], [0, 0, 1], [0, -1, 0]])
    assert not np.any(cobracket(bi, e3))


def test_cocycle_su2_passes(su2):
    assert cocycle_residual(su2.bialgebra) <= 1e-12
    assert coboundary_residual(su2.bialgebra) <= 1e-12
    assert duality_residual(su2.bialgebra) == 0.0


def test_cocycle_incompatible_pair_fails():
    dual = np.zeros((3, 3, 3))
    dual[1, 0, 1], dual[1, 1, 0] = 1, -1   # [f1, f2] = f2
    bi = LieBialgebraData(LieAlgebraData(su2_constants()), LieAlgebraData(dual))
    assert jacobi_residual(dual) == 0.0
    assert cocycle_residual(bi) > 0.1
    with pytest.raises(ValueError, match="cocycle"):
        build_double(bi)


def test_double_semidirect_for_zero_dual():
    c = su2_constants()
    bi = LieBialgebraData(LieAlgebraData(c), LieAlgebraData(np.zeros((3, 3, 3))))
    d = double_constants(bi)
    # [X, xi] has no g-component; its g*-part is ad*_X xi
    assert not np.any(d[:3, :3, 3:])
    for i in range(3):
        for a in range(3):
            assert np.array_equal(d[3:, i, 3 + a], -c[a, i, :])


def test_double_mixed_bracket_from_invariance(su2, aff1):
    """Mixed brackets recovered from the invariant pairing alone."""
    for ex in (su2, aff1):
        bi = ex.bialgebra
        n = bi.dim
        d = double_constants(bi)
        c, cs = bi.primal.c, bi.dual.c
        for i in range(n):
            for a in range(n):
                z = d[:, i, n + a]
                for j in range(n):
                    # <[e_i, f^a], e_j> = -<f^a, [e_i, e_j]>
                    assert z[n + j] == -c[a, i, j]
                    # <[e_i, f^a], f^j> = <e_i, [f^a, f^j]>
                    assert z[j] == cs[i, a, j]


def test_su2_double_is_sl2c():
    c, cs = su2_constants(), sb2_constants()
    dd = build_double(LieBialgebraData(LieAlgebraData(c), LieAlgebraData(cs)))
    assert jacobi_residual(dd.c_double) == 0.0
    assert all(r.passed for r in check_double(dd))
    # real form of a complex simple algebra: Killing form nondegenerate with signature (3, 3)
    ads = [dd.ad(e) for e in np.eye(6)]
    kill = np.array([[np.trace(a @ b) for b in ads] for a in ads])
    ev = np.linalg.eigvalsh(kill)
    assert (ev > 1e-9).sum() == 3 and (ev < -1e-9).sum() == 3


def test_aff1_pairing_invariance(aff1):
    assert pairing_invariance_residual(aff1.double_algebra) == 0.0


def test_r_matrix_must_be_antisymmetric():
    with pytest.raises(ValueError):
        LieBialgebraData(LieAlgebraData(su2_constants()), LieAlgebraData(sb2_constants()), np.eye(3))


def test_coisotropy_residual_detects_non_subalgebra():
    bi = LieBialgebraData(LieAlgebraData(np.zeros((3, 3, 3))), LieAlgebraData(su2_constants()))
    assert coisotropy_residual(bi, [[1.0, 0.0, 0.0]]) == pytest.approx(1.0)
    assert coisotropy_residual(bi, np.eye(3)) == 0.0
    assert coisotropy_residual(bi, np.zeros((0, 3))) == 0.0


def test_su2_torus_coisotropic(su2):
    assert coisotropy_residual(su2.bialgebra, [[0.0, 0.0, 1.0]]) <= 1e-12
