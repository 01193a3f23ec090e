"""Discretized g*-paths and cotangent paths.

A g*-path xi(t) is integrated to u(t) through u' = xi(t) u, u(0) = e, so
that xi is the right logarithmic derivative of u. Paths are sampled on
uniform grids; midpoint values needed by RK4 come from four-point cubic
interpolation, which keeps the scheme fourth order.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .charts import Manifold
from .double import DoubleGroupModel
from .group import MatrixGroupModel
from .poisson import BivectorProvider

RETRACTION_GUARD = 1e-6


class PathError(ArithmeticError):
    pass


@dataclass(frozen=True)
class DualLiePath:
    """Samples xi(t_i) at N + 1 uniform times of [t0, t1]."""

    samples: np.ndarray
    t0: float = 0.0
    t1: float = 1.0

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if s.ndim != 2 or s.shape[0] < 3:
            raise ValueError("a path needs at least three samples (N >= 2)")
        if not np.all(np.isfinite(s)):
            raise ValueError("path samples must be finite")
        object.__setattr__(self, "samples", s)

    @property
    def N(self) -> int:
        return self.samples.shape[0] - 1

    @property
    def times(self) -> np.ndarray:
        return np.linspace(self.t0, self.t1, self.N + 1)

    @classmethod
    def from_function(cls, fn: Callable, N: int, t0: float = 0.0, t1: float = 1.0) -> "DualLiePath":
        return cls(np.array([fn(t) for t in np.linspace(t0, t1, N + 1)]), t0, t1)

    def midpoints(self) -> np.ndarray:
        """xi at the N interval midpoints by four-point cubic interpolation."""
        s = self.samples
        if self.N == 2:
            # quadratic through the three samples
            return np.array([(3 * s[0] + 6 * s[1] - s[2]) / 8, (-s[0] + 6 * s[1] + 3 * s[2]) / 8])
        mid = np.empty((self.N, s.shape[1]))
        mid[1:-1] = (-s[:-3] + 9 * s[1:-2] + 9 * s[2:-1] - s[3:]) / 16
        mid[0] = (5 * s[0] + 15 * s[1] - 5 * s[2] + s[3]) / 16
        mid[-1] = (5 * s[-1] + 15 * s[-2] - 5 * s[-3] + s[-4]) / 16
        return mid


@dataclass(frozen=True)
class ConcatenatedPath:
    """Gluing of paths traversed in order, each reparametrized onto its share of [0, 1]."""

    pieces: tuple[DualLiePath, ...]


def concatenate(first: DualLiePath, second: DualLiePath) -> ConcatenatedPath:
    """Traverse ``first`` on [0, 1/2] then ``second`` on [1/2, 1], both at double speed."""
    return ConcatenatedPath((DualLiePath(2 * first.samples, 0.0, 0.5), DualLiePath(2 * second.samples, 0.5, 1.0)))


def reconstruct_group_path(dp: DualLiePath | ConcatenatedPath, model: MatrixGroupModel,
                           start: np.ndarray | None = None) -> list[np.ndarray]:
    """u(t_i) solving u' = xi(t) u with RK4 and a retraction after each step."""
    if isinstance(dp, ConcatenatedPath):
        out, u = [], start
        for piece in dp.pieces:
            seg = reconstruct_group_path(piece, model, u)
            out.extend(seg if not out else seg[1:])
            u = seg[-1]
        return out
    u = model.identity() if start is None else np.array(start)
    h = (dp.t1 - dp.t0) / dp.N
    xs = [model.hat(v) for v in dp.samples]
    xm = [model.hat(v) for v in dp.midpoints()]
    out = [u]
    for i in range(dp.N):
        k1 = xs[i] @ u
        k2 = xm[i] @ (u + 0.5 * h * k1)
        k3 = xm[i] @ (u + 0.5 * h * k2)
        k4 = xs[i + 1] @ (u + h * k3)
        raw = u + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        u = model.retract(raw)
        drift = np.abs(u - raw).max()
        if not np.isfinite(drift) or drift > RETRACTION_GUARD:
            raise PathError(f"retraction moved the solution by {drift:.2e} at step {i}")
        out.append(u)
    return out


def endpoint(dp, model: MatrixGroupModel) -> np.ndarray:
    return reconstruct_group_path(dp, model)[-1]


def split_at_middle(dp: DualLiePath) -> tuple[DualLiePath, DualLiePath]:
    if dp.N % 2:
        raise ValueError("splitting at t = 1/2 needs an even step count")
    k = dp.N // 2
    tm = 0.5 * (dp.t0 + dp.t1)
    return DualLiePath(dp.samples[: k + 1], dp.t0, tm), DualLiePath(dp.samples[k:], tm, dp.t1)


def oracle_path(model: MatrixGroupModel, a, b, N: int) -> tuple[DualLiePath, Callable]:
    """xi for u(t) = exp(tA) exp(t^2 B): xi(t) = A + 2t Ad_exp(tA) B."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    path = DualLiePath.from_function(lambda t: a + 2 * t * model.adjoint(model.exp(t * a)) @ b, N)
    return path, lambda t: model.exp(t * a) @ model.exp(t * t * b)


def reconstruction_errors(model: MatrixGroupModel, a, b, grid: Sequence[int]) -> np.ndarray:
    errs = []
    for N in grid:
        path, exact = oracle_path(model, a, b, N)
        errs.append(np.abs(endpoint(path, model) - exact(1.0)).max())
    return np.array(errs)


def convergence_slope(grid: Sequence[int], errors: Sequence[float]) -> float:
    """Least-squares slope of log(error) against log(1/N); 4 for a fourth-order method."""
    return float(-np.polyfit(np.log(np.asarray(grid, dtype=float)), np.log(np.asarray(errors)), 1)[0])


# ---------------------------------------------------------------- dressing of paths


def path_dressing(dm: DoubleGroupModel, g: np.ndarray, dp: DualLiePath) -> DualLiePath:
    """Samplewise Ad*_{k(t)} xi(t) with k(t) = g^{u(1) u(t)^-1}."""
    us = reconstruct_group_path(dp, dm.gstar_model)
    u1 = us[-1]
    out = np.empty_like(dp.samples)
    for i, (u, xi) in enumerate(zip(us, dp.samples)):
        try:
            k = dm.right_dressing_on_g(g, u1 @ np.linalg.inv(u))
        except ArithmeticError as exc:
            raise PathError(f"dressing failed at t = {dp.times[i]:.6f}: {exc}") from exc
        out[i] = dm.coadjoint_g_on_gstar(k) @ xi
    return DualLiePath(out, dp.t0, dp.t1)


# ---------------------------------------------------------------- cotangent paths


@dataclass(frozen=True)
class CotangentPathDisc:
    """Base samples gamma(t_i) and chart-basis covectors a(t_i) on [0, 1]."""

    base: tuple
    covectors: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.covectors, dtype=float)
        if len(self.base) != a.shape[0] or a.shape[0] < 3:
            raise ValueError("need matching base and covector samples, at least three")
        object.__setattr__(self, "covectors", a)
        object.__setattr__(self, "base", tuple(self.base))

    @property
    def N(self) -> int:
        return len(self.base) - 1


def cotangent_path_residual(cp: CotangentPathDisc, m: Manifold, pi: BivectorProvider) -> float:
    """max over steps of |chart increment * N - average of pi^#(a)|, an O(1/N^2) quantity."""
    n = cp.N
    worst = 0.0
    sharp = [pi.evaluate(x).T @ a for x, a in zip(cp.base, cp.covectors)]
    for i in range(n):
        vel = m.local(cp.base[i], cp.base[i + 1]) * n
        worst = max(worst, float(np.abs(vel - 0.5 * (sharp[i] + sharp[i + 1])).max()))
    return worst


def transformation_cotangent_path(dm: DoubleGroupModel, dp: DualLiePath, g0: np.ndarray) -> CotangentPathDisc:
    """The cotangent path of (u(1), g0): gamma(t) = ^{u(t)} g0 with covector xi(t)."""
    us = reconstruct_group_path(dp, dm.gstar_model)
    return CotangentPathDisc(tuple(dm.left_dressing_on_g(u, g0) for u in us), dp.samples)


def momentum_of_path(j: Callable, cp: CotangentPathDisc, gstar_model: MatrixGroupModel) -> np.ndarray:
    """J([a]) as the endpoint of the g*-path t -> j(gamma(t), a(t))."""
    samples = np.array([j(x, a) for x, a in zip(cp.base, cp.covectors)])
    return endpoint(DualLiePath(samples), gstar_model)


def path_lifted_action(dm: DoubleGroupModel, j: Callable, g: np.ndarray, cp: CotangentPathDisc,
                       cotangent_lift: Callable) -> CotangentPathDisc:
    """Apply k(t) = g^{J(x) J(x(t))^-1} samplewise through the cotangent lift of the base action.

    J(x(t)) is the reconstruction truncated at t; ``cotangent_lift(k, m, a)``
    returns the transformed (point, covector).
    """
    samples = np.array([j(x, a) for x, a in zip(cp.base, cp.covectors)])
    us = reconstruct_group_path(DualLiePath(samples), dm.gstar_model)
    u1 = us[-1]
    base, cov = [], []
    for x, a, u in zip(cp.base, cp.covectors, us):
        k = dm.right_dressing_on_g(g, u1 @ np.linalg.inv(u))
        x2, a2 = cotangent_lift(k, x, a)
        base.append(x2)
        cov.append(a2)
    return CotangentPathDisc(tuple(base), np.array(cov))


def left_translation_lift(dm: DoubleGroupModel) -> Callable:
    """Cotangent lift of left translation on G in right-trivialized covector components."""
    return lambda k, x, a: (k @ x, dm.coadjoint_g_on_gstar(k) @ a)


# ---------------------------------------------------------------- CSV


def write_csv(path: str | Path, dp: DualLiePath) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t"] + [f"xi{i + 1}" for i in range(dp.samples.shape[1])])
        for t, row in zip(dp.times, dp.samples):
            w.writerow([repr(float(t))] + [repr(float(v)) for v in row])


def read_csv(path: str | Path) -> DualLiePath:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    data = np.array([[float(v) for v in r] for r in rows[1:]])
    return DualLiePath(data[:, 1:], float(data[0, 0]), float(data[-1, 0]))
