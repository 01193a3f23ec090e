"""The double group D containing G and G*, its factorizations and dressing actions.

Conventions: ``g u = (^g u)(g^u)`` defines the left dressing of G on G* and
the right dressing of G* on G; the mirrored ``u g = (^u g)(u^g)`` defines the
left dressing of G* on G and the right dressing of G on G*.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .algebra import DoubleAlgebraData
from .group import LogConvergenceError, MatrixGroupModel, complexify, realify


class Order(str, Enum):
    GSTAR_G = "GSTAR_G"   # d = u g
    G_GSTAR = "G_GSTAR"   # d = g u


class FactorizationError(ArithmeticError):
    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


@dataclass(frozen=True)
class Factorization:
    gstar_part: np.ndarray
    g_part: np.ndarray
    order: Order

    def product(self) -> np.ndarray:
        if self.order is Order.GSTAR_G:
            return self.gstar_part @ self.g_part
        return self.g_part @ self.gstar_part


def _gram_schmidt(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Modified Gram-Schmidt QR of a complex square matrix, R with positive diagonal."""
    n = a.shape[0]
    q = a.astype(complex).copy()
    r = np.zeros((n, n), dtype=complex)
    for j in range(n):
        r[j, j] = np.linalg.norm(q[:, j])
        if r[j, j] == 0:
            raise FactorizationError("singular matrix in Gram-Schmidt", 0.0)
        q[:, j] /= r[j, j]
        for k in range(j + 1, n):
            r[j, k] = np.vdot(q[:, j], q[:, k])
            q[:, k] -= r[j, k] * q[:, j]
    return q, r


def iwasawa_factorize(d: np.ndarray, order: Order) -> tuple[np.ndarray, np.ndarray]:
    """SL(2,C) = SB(2,C) SU(2) in realified form. Returns (gstar_part, g_part)."""
    z = complexify(d)
    if order is Order.G_GSTAR:
        q, r = _gram_schmidt(z)
        return realify(r), realify(q)
    q, r = _gram_schmidt(np.linalg.inv(z))
    return realify(np.linalg.inv(r)), realify(q.conj().T)


@dataclass(frozen=True, eq=False)
class DoubleGroupModel:
    """G and G* inside D, sharing one representation.

    D's generators are G's generators followed by G*'s, so the inclusions
    of the Lie algebras are the index ranges ``[:n]`` and ``[n:]``.
    """

    g_model: MatrixGroupModel
    gstar_model: MatrixGroupModel
    d_model: MatrixGroupModel
    factorizer: str
    complete: bool
    newton_max_iter: int = 50
    tol: float = 1e-11

    def __post_init__(self):
        n = self.g_model.dim
        if self.gstar_model.dim != n or self.d_model.dim != 2 * n:
            raise ValueError("D must have dimension 2 dim G with dim G = dim G*")
        if not (np.allclose(self.d_model.generators[:n], self.g_model.generators)
                and np.allclose(self.d_model.generators[n:], self.gstar_model.generators)):
            raise ValueError("D generators must be G generators followed by G* generators")
        if self.factorizer not in FACTORIZERS:
            raise ValueError(f"unknown factorizer {self.factorizer!r}; choose from {sorted(FACTORIZERS)}")
        if self.factorizer == "semidirect_trivial":
            gens = self.d_model.generators
            comm = max(np.abs(a @ b - b @ a).max() for a in gens for b in gens)
            if comm > 1e-12:
                raise ValueError("semidirect_trivial factorizer needs a commutative double")

    @property
    def n(self) -> int:
        return self.g_model.dim

    def embedding_residual(self, dd: DoubleAlgebraData) -> float:
        """Distance between the constants of D's generators and the algebraic double."""
        return float(np.abs(self.d_model.algebra().c - dd.c_double).max())

    def factorize(self, d: np.ndarray, order: Order = Order.GSTAR_G) -> Factorization:
        order = Order(order)
        u, g = FACTORIZERS[self.factorizer](self, d, order)
        f = Factorization(u, g, order)
        res = float(np.abs(f.product() - d).max())
        if res > self.tol * max(1.0, np.abs(d).max()):
            raise FactorizationError("not factorizable at tolerance", res)
        return f

    def dress_g_on_gstar(self, g: np.ndarray, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(^g u, g^u) from g u = (^g u)(g^u)."""
        f = self.factorize(g @ u, Order.GSTAR_G)
        return f.gstar_part, f.g_part

    def dress_gstar_on_g(self, u: np.ndarray, g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(^u g, u^g) from u g = (^u g)(u^g)."""
        f = self.factorize(u @ g, Order.G_GSTAR)
        return f.g_part, f.gstar_part

    def left_dressing_on_gstar(self, g, u):
        return self.dress_g_on_gstar(g, u)[0]

    def right_dressing_on_g(self, g, u):
        return self.dress_g_on_gstar(g, u)[1]

    def left_dressing_on_g(self, u, g):
        return self.dress_gstar_on_g(u, g)[0]

    def right_dressing_on_gstar(self, u, g):
        return self.dress_gstar_on_g(u, g)[1]

    def adjoint_d(self, d: np.ndarray) -> np.ndarray:
        return self.d_model.adjoint(d)

    def dressing_bivector(self, g: np.ndarray) -> np.ndarray:
        """Poisson-Lie bivector of G read off the infinitesimal left dressing of G*.

        Differentiating u g = (^u g)(u^g) at u = e gives the field
        eta -> (Ad_g P_g Ad_g^-1 eta) restricted to g, which equals pi(g)^T eta.
        """
        n = self.n
        a = self.adjoint_d(g)
        ai = self.adjoint_d(np.linalg.inv(g))
        lam = (a[:n, :n] @ ai[:n, n:])
        return lam.T

    def coadjoint_g_on_gstar(self, k: np.ndarray) -> np.ndarray:
        """Coadjoint action of k in G on g* coefficients, (Ad_k^-1)^T."""
        return self.g_model.coadjoint_star(k)


def _iwasawa(dm: DoubleGroupModel, d, order):
    return iwasawa_factorize(d, order)


def _semidirect_trivial(dm: DoubleGroupModel, d, order):
    v = dm.d_model.log(d)
    n = dm.n
    return dm.gstar_model.exp(v[n:]), dm.g_model.exp(v[:n])


def _newton(dm: DoubleGroupModel, d, order):
    """Damped Gauss-Newton on chart coordinates (a, b) of the two factors."""
    n = dm.n
    gm, sm = dm.g_model, dm.gstar_model

    def assemble(p):
        u, g = sm.exp(p[n:]), gm.exp(p[:n])
        return (u @ g) if order is Order.GSTAR_G else (g @ u)

    def resid(p):
        # far from the factorizable set the trial factors can overflow; the norm test rejects them
        with np.errstate(over="ignore", invalid="ignore"):
            return (assemble(p) - d).ravel()

    try:
        p = dm.d_model.log(d, strict=False)
    except (LogConvergenceError, ValueError, np.linalg.LinAlgError):
        p = np.zeros(2 * n)
    r = resid(p)
    norm = np.linalg.norm(r)
    h = 1e-7
    for _ in range(dm.newton_max_iter):
        if norm < 1e-14:
            break
        jac = np.column_stack([(resid(p + h * e) - resid(p - h * e)) / (2 * h) for e in np.eye(2 * n)])
        step = np.linalg.lstsq(jac, -r, rcond=None)[0]
        t = 1.0
        while t > 1e-4:
            trial = p + t * step
            rt = resid(trial)
            nt = np.linalg.norm(rt)
            if nt < norm:
                p, r, norm = trial, rt, nt
                break
            t *= 0.5
        else:
            break
    if norm > 1e-12 * max(1.0, np.abs(d).max()):
        raise FactorizationError("not factorizable at tolerance", float(norm))
    return sm.exp(p[n:]), gm.exp(p[:n])


FACTORIZERS = {
    "iwasawa_sl2c": _iwasawa,
    "newton": _newton,
    "semidirect_trivial": _semidirect_trivial,
}


def infinitesimal_dressing(pi_g, eta, g) -> np.ndarray:
    """lambda(eta)_g = pi_G^#(eta^R) in chart-basis components.

    ``pi_g`` is a provider; eta^R has chart components eta, and
    pi^#(alpha) = pi(alpha, .) is the matrix pi^T alpha.
    """
    return pi_g.evaluate(g).T @ np.asarray(eta, dtype=float)
