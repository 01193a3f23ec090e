"""Matrix Lie groups: exponential, logarithm, adjoint maps, retractions.

Lie algebra elements are coefficient vectors against a list of generator
matrices. Brackets follow the right-invariant convention, so for matrix
generators ``[X, Y] = YX - XY``; consequently ``Ad_exp(tX) = exp(-t ad_X)``.
Group elements are plain ``numpy`` arrays.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .algebra import LieAlgebraData


class LogConvergenceError(ArithmeticError):
    """The logarithm series cannot converge for the given element."""


class RepresentationError(ValueError):
    """A matrix falls outside the span of the generators."""


def realify(m: np.ndarray) -> np.ndarray:
    """Complex n x n -> real 2n x 2n, A + iB -> [[A, -B], [B, A]]."""
    a, b = m.real, m.imag
    return np.block([[a, -b], [b, a]])


def complexify(r: np.ndarray) -> np.ndarray:
    n = r.shape[0] // 2
    return r[:n, :n] + 1j * r[n:, :n]


def _sqrtm_db(a: np.ndarray, max_iter: int = 60) -> np.ndarray:
    """Principal square root by the product form of the Denman-Beavers iteration."""
    eye = np.eye(a.shape[0])
    y, z = a.copy(), eye.copy()
    for _ in range(max_iter):
        yn = 0.5 * (y + np.linalg.inv(z))
        z = 0.5 * (z + np.linalg.inv(y))
        done = np.abs(yn - y).max() <= 1e-15 * max(1.0, np.abs(yn).max())
        y = yn
        if done:
            return y
    raise LogConvergenceError("square root iteration did not converge")


def matrix_log(a: np.ndarray, strict: bool = True) -> np.ndarray:
    """Principal logarithm by inverse scaling and squaring with a Gregory series core.

    With ``strict`` only elements with spectral radius of ``a - I`` below one
    are accepted, the region where the series for ``log(I + E)`` converges
    without any square roots. Otherwise square roots are taken first, which
    works whenever no eigenvalue lies on the closed negative real axis.
    The core evaluates ``2 artanh(Z)`` with ``Z = (A - I)(A + I)^-1``, which
    converges in powers of ``Z^2``.
    """
    a = np.asarray(a)
    eye = np.eye(a.shape[0])
    rho = np.abs(np.linalg.eigvals(a - eye)).max()
    if strict and not rho < 1.0:
        raise LogConvergenceError(
            f"log series diverges: spectral radius of g - I is {rho:.3f} >= 1 for element\n{a}")
    x, k = a, 0
    while True:
        z = np.linalg.solve((x + eye).T, (x - eye).T).T
        if np.linalg.norm(z, 1) <= 0.4:
            break
        x = _sqrtm_db(x)
        k += 1
        if k > 40:
            raise LogConvergenceError(f"too many square roots taken for element\n{a}")
    z2 = z @ z
    out = z.copy()
    term = z
    for m in range(3, 400, 2):
        term = term @ z2
        out = out + term / m
        if np.abs(term).max() / m < 1e-18:
            break
    else:
        raise LogConvergenceError(f"log series did not converge for element\n{a}")
    return 2.0 * out * 2.0 ** k


def _retract_su(m: np.ndarray) -> np.ndarray:
    z = complexify(m)
    u, _, vh = np.linalg.svd(z)
    q = u @ vh
    q = q / np.sqrt(np.linalg.det(q))
    return realify(q)


def _retract_upper(m: np.ndarray) -> np.ndarray:
    z = complexify(m).copy()
    n = z.shape[0]
    z[np.tril_indices(n, -1)] = 0.0
    d = np.abs(np.diag(z))
    d = d / np.prod(d) ** (1.0 / n)
    z[np.diag_indices(n)] = d
    return realify(z)


RETRACTIONS = {
    "none": lambda m: m,
    "su2": _retract_su,
    "sb2c": _retract_upper,
}


@dataclass(frozen=True, eq=False)
class MatrixGroupModel:
    """A connected matrix group given by the generators of its Lie algebra."""

    name: str
    generators: np.ndarray
    retraction: str = "none"
    membership_tol: float = 1e-9
    _pinv: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        gens = np.asarray(self.generators, dtype=float)
        if gens.ndim != 3 or gens.shape[1] != gens.shape[2]:
            raise ValueError("generators must be an array of square matrices")
        if self.retraction not in RETRACTIONS:
            raise ValueError(f"unknown retraction {self.retraction!r}; choose from {sorted(RETRACTIONS)}")
        object.__setattr__(self, "generators", gens)
        basis = gens.reshape(gens.shape[0], -1).T
        if np.linalg.matrix_rank(basis) < gens.shape[0]:
            raise ValueError("generators are linearly dependent")
        object.__setattr__(self, "_pinv", np.linalg.pinv(basis))

    @property
    def dim(self) -> int:
        return self.generators.shape[0]

    @property
    def rep_dim(self) -> int:
        return self.generators.shape[1]

    def identity(self) -> np.ndarray:
        return np.eye(self.rep_dim)

    def hat(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape != (self.dim,):
            raise ValueError(f"{self.name}: expected {self.dim} coefficients, got shape {v.shape}")
        return np.tensordot(v, self.generators, axes=1)

    def coefficients(self, x: np.ndarray, tol: float = 1e-10) -> np.ndarray:
        """Coefficients of a matrix in the generator span, refusing matrices outside it."""
        flat = np.real_if_close(np.asarray(x)).reshape(-1)
        v = self._pinv @ flat
        res = np.abs(self.generators.reshape(self.dim, -1).T @ v - flat).max()
        if res > tol * max(1.0, np.abs(flat).max()):
            raise RepresentationError(f"{self.name}: matrix is {res:.2e} away from the generator span")
        return v

    def exp(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if not np.all(np.isfinite(v)):
            raise ValueError("exp of a non-finite vector")
        return expm(self.hat(v))

    def log(self, g: np.ndarray, strict: bool = True) -> np.ndarray:
        return self.coefficients(matrix_log(g, strict))

    def inverse(self, g: np.ndarray) -> np.ndarray:
        return np.linalg.inv(g)

    def adjoint(self, g: np.ndarray) -> np.ndarray:
        """Matrix of X -> g X g^-1 in the generator basis."""
        gi = np.linalg.inv(g)
        conj = np.einsum("ab,kbc,cd->kad", g, self.generators, gi)
        return np.column_stack([self.coefficients(m) for m in conj])

    def coadjoint_star(self, g: np.ndarray) -> np.ndarray:
        """Inverse transpose of the adjoint: the coadjoint action on dual coefficients."""
        return np.linalg.inv(self.adjoint(g)).T

    def retract(self, m: np.ndarray) -> np.ndarray:
        return RETRACTIONS[self.retraction](m)

    def membership_residual(self, g: np.ndarray) -> float:
        if self.retraction != "none":
            return float(np.abs(self.retract(g) - g).max())
        try:
            x = matrix_log(g, strict=False)
        except (LogConvergenceError, np.linalg.LinAlgError):
            return float("inf")
        flat = x.reshape(-1)
        return float(np.abs(self.generators.reshape(self.dim, -1).T @ (self._pinv @ flat) - flat).max())

    def contains(self, g: np.ndarray) -> bool:
        return self.membership_residual(g) <= self.membership_tol

    def algebra(self) -> LieAlgebraData:
        """Structure constants read off the generators with [X, Y] = YX - XY."""
        n = self.dim
        c = np.zeros((n, n, n))
        for i in range(n):
            for j in range(n):
                a, b = self.generators[i], self.generators[j]
                c[:, i, j] = self.coefficients(b @ a - a @ b)
        return LieAlgebraData(c)

    def random_element(self, rng: np.random.Generator, scale: float = 0.7) -> np.ndarray:
        return self.exp(rng.uniform(-scale, scale, self.dim))

    def right_trivialized(self, g: np.ndarray, dg: np.ndarray) -> np.ndarray:
        """Coefficients of dg g^-1, the chart-basis form of a tangent matrix dg at g."""
        return self.coefficients(dg @ np.linalg.inv(g))
