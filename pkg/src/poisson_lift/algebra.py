"""Structure-constant level Lie algebras, Lie bialgebras and their doubles.

Constants are stored as ``c[k, i, j]`` with ``[e_i, e_j] = sum_k c[k, i, j] e_k``.
The dual algebra uses the dual basis ``f^i`` with ``<f^i, e_j> = delta_ij``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .report import CheckReport

ALGEBRA_TOL = 1e-12


@dataclass(frozen=True)
class LieAlgebraData:
    c: np.ndarray
    basis_labels: tuple[str, ...] = ()

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        if c.ndim != 3 or not (c.shape[0] == c.shape[1] == c.shape[2]):
            raise ValueError(f"structure constants must have shape (n, n, n), got {c.shape}")
        object.__setattr__(self, "c", c)
        if not self.basis_labels:
            object.__setattr__(self, "basis_labels", tuple(f"e{i + 1}" for i in range(c.shape[0])))
        elif len(self.basis_labels) != c.shape[0]:
            raise ValueError("one basis label per basis vector is required")

    @property
    def dim(self) -> int:
        return self.c.shape[0]

    def ad(self, x) -> np.ndarray:
        """Matrix of y -> [x, y]."""
        x = _vec(x, self.dim)
        return np.einsum("kij,i->kj", self.c, x)

    def antisymmetry_residual(self) -> float:
        return float(np.abs(self.c + self.c.transpose(0, 2, 1)).max(initial=0.0))


def _vec(x, n: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (n,):
        raise ValueError(f"expected a vector of length {n}, got shape {x.shape}")
    return x


def bracket(alg: LieAlgebraData, x, y) -> np.ndarray:
    x, y = _vec(x, alg.dim), _vec(y, alg.dim)
    return np.einsum("kij,i,j->k", alg.c, x, y)


def jacobi_residual(c: np.ndarray) -> float:
    """Largest entry of the cyclic sum [[e_i,e_j],e_k] + cyclic over all basis triples."""
    # [[e_i,e_j],e_k]^m = c[l,i,j] c[m,l,k]
    t = np.einsum("lij,mlk->mijk", c, c)
    cyc = t + t.transpose(0, 2, 3, 1) + t.transpose(0, 3, 1, 2)
    return float(np.abs(cyc).max(initial=0.0))


def check_jacobi(alg: LieAlgebraData, tolerance: float = ALGEBRA_TOL) -> CheckReport:
    n = alg.dim
    return CheckReport(name="jacobi", max_residual=jacobi_residual(alg.c), tolerance=tolerance,
                       n_samples=n ** 3)


def check_antisymmetry(alg: LieAlgebraData, tolerance: float = ALGEBRA_TOL) -> CheckReport:
    return CheckReport(name="antisymmetry", max_residual=alg.antisymmetry_residual(),
                       tolerance=tolerance, n_samples=alg.dim ** 3)


@dataclass(frozen=True)
class LieBialgebraData:
    """A pair (g, g*) of Lie algebras in duality, with an optional r-matrix.

    ``complete`` is a declared property of the integrating group and is
    never inferred.
    """

    primal: LieAlgebraData
    dual: LieAlgebraData
    r_matrix: np.ndarray | None = None
    complete: bool = False

    def __post_init__(self):
        if self.primal.dim != self.dual.dim:
            raise ValueError("primal and dual algebras must have the same dimension")
        if self.r_matrix is not None:
            r = np.asarray(self.r_matrix, dtype=float)
            if r.shape != (self.dim, self.dim):
                raise ValueError(f"r-matrix must be {self.dim}x{self.dim}")
            if np.abs(r + r.T).max() > ALGEBRA_TOL:
                raise ValueError("r-matrix must be antisymmetric")
            object.__setattr__(self, "r_matrix", r)

    @property
    def dim(self) -> int:
        return self.primal.dim


def cobracket(bi: LieBialgebraData, x) -> np.ndarray:
    """delta(x) as an antisymmetric array, <delta(x), f^a ^ f^b> = <x, [f^a, f^b]>."""
    x = _vec(x, bi.dim)
    return np.einsum("kab,k->ab", bi.dual.c, x)


def ad_on_bivectors(alg: LieAlgebraData, x, t: np.ndarray) -> np.ndarray:
    a = alg.ad(x)
    return a @ t + t @ a.T


def cocycle_residual(bi: LieBialgebraData) -> float:
    eye = np.eye(bi.dim)
    worst = 0.0
    for i, j in product(range(bi.dim), repeat=2):
        x, y = eye[i], eye[j]
        lhs = cobracket(bi, bracket(bi.primal, x, y))
        rhs = ad_on_bivectors(bi.primal, x, cobracket(bi, y)) - ad_on_bivectors(bi.primal, y, cobracket(bi, x))
        worst = max(worst, float(np.abs(lhs - rhs).max()))
    return worst


def check_cocycle(bi: LieBialgebraData, tolerance: float = ALGEBRA_TOL) -> CheckReport:
    return CheckReport(name="cocycle", max_residual=cocycle_residual(bi), tolerance=tolerance,
                       n_samples=bi.dim ** 2)


def coboundary_residual(bi: LieBialgebraData) -> float:
    """max |delta(e_i) - ad_{e_i} r| over basis vectors; requires an r-matrix."""
    if bi.r_matrix is None:
        raise ValueError("bialgebra has no r-matrix")
    eye = np.eye(bi.dim)
    return max(float(np.abs(cobracket(bi, e) - ad_on_bivectors(bi.primal, e, bi.r_matrix)).max()) for e in eye)


def duality_residual(bi: LieBialgebraData) -> float:
    """Evaluate <delta(x), f^a ^ f^b> against <x, [f^a, f^b]> as two separate contractions."""
    eye = np.eye(bi.dim)
    worst = 0.0
    for k in range(bi.dim):
        d = cobracket(bi, eye[k])
        for a, b in product(range(bi.dim), repeat=2):
            worst = max(worst, abs(d[a, b] - float(eye[k] @ bracket(bi.dual, eye[a], eye[b]))))
    return worst


@dataclass(frozen=True)
class DoubleAlgebraData:
    """The double d = g + g*, basis ordered as (e_1..e_n, f^1..f^n)."""

    n: int
    c_double: np.ndarray
    pairing_matrix: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return 2 * self.n

    @property
    def algebra(self) -> LieAlgebraData:
        labels = tuple(f"e{i + 1}" for i in range(self.n)) + tuple(f"f{i + 1}" for i in range(self.n))
        return LieAlgebraData(self.c_double, labels)

    def ad(self, z) -> np.ndarray:
        return np.einsum("kij,i->kj", self.c_double, _vec(z, self.dim))


def pairing_matrix(n: int) -> np.ndarray:
    z, i = np.zeros((n, n)), np.eye(n)
    return np.block([[z, i], [i, z]])


def double_constants(bi: LieBialgebraData) -> np.ndarray:
    """Constants of g + g* with [X, xi] = ad*_X xi - ad*_xi X."""
    n = bi.dim
    c, cs = bi.primal.c, bi.dual.c
    d = np.zeros((2 * n, 2 * n, 2 * n))
    d[:n, :n, :n] = c
    d[n:, n:, n:] = cs
    for i, a in product(range(n), repeat=2):
        # ad*_{e_i} f^a = -sum_b c[a, i, b] f^b ; ad*_{f^a} e_i = -sum_b cs[i, a, b] e_b
        mixed = np.zeros(2 * n)
        mixed[n:] = -c[a, i, :]
        mixed[:n] = cs[i, a, :]
        d[:, i, n + a] = mixed
        d[:, n + a, i] = -mixed
    return d


def build_double(bi: LieBialgebraData, tolerance: float = ALGEBRA_TOL) -> DoubleAlgebraData:
    res = cocycle_residual(bi)
    if res > tolerance:
        raise ValueError(f"cocycle condition fails (residual {res:.3e}); refusing to build the double")
    return DoubleAlgebraData(n=bi.dim, c_double=double_constants(bi), pairing_matrix=pairing_matrix(bi.dim))


def pairing_invariance_residual(dd: DoubleAlgebraData) -> float:
    """max |<[z,w],v> + <w,[z,v]>| over basis triples."""
    p = dd.pairing_matrix
    worst = 0.0
    for z in range(dd.dim):
        a = dd.ad(np.eye(dd.dim)[z])
        worst = max(worst, float(np.abs(a.T @ p + p @ a).max()))
    return worst


def isotropy_residual(dd: DoubleAlgebraData) -> float:
    n, p = dd.n, dd.pairing_matrix
    return float(max(np.abs(p[:n, :n]).max(), np.abs(p[n:, n:]).max()))


def subalgebra_residual(dd: DoubleAlgebraData) -> float:
    """Components of [g,g] outside g and of [g*,g*] outside g*."""
    n, c = dd.n, dd.c_double
    return float(max(np.abs(c[n:, :n, :n]).max(), np.abs(c[:n, n:, n:]).max()))


def check_double(dd: DoubleAlgebraData, tolerance: float = ALGEBRA_TOL) -> list[CheckReport]:
    return [
        CheckReport("double_jacobi", jacobi_residual(dd.c_double), tolerance, n_samples=dd.dim ** 3),
        CheckReport("double_antisymmetry", dd.algebra.antisymmetry_residual(), tolerance, n_samples=dd.dim ** 3),
        CheckReport("pairing_invariance", pairing_invariance_residual(dd), tolerance, n_samples=dd.dim ** 3),
        CheckReport("isotropy", isotropy_residual(dd), tolerance, n_samples=dd.dim ** 2),
        CheckReport("subalgebras", subalgebra_residual(dd), tolerance, n_samples=dd.dim ** 3),
    ]
