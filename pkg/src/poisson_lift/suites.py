"""Named verification suites over a loaded example.

Every check is registered once, under exactly one suite, with its default
tolerance and a predicate saying which examples it applies to. Each check
draws from its own generator seeded by (seed, suite/check name), so
results do not depend on which other checks ran.
"""
from __future__ import annotations

import copy
import tempfile
import time
import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable

import numpy as np
from scipy.linalg import block_diag

from .charts import GroupManifold, ProductManifold, pushforward_in_chart
from .examples import Example, ExampleError, load_example, parse_example
from .groupoid import (TransformationGroupoid, TransfPoint, axiom_residuals, check_multiplicativity, heisenberg_sign_scan,
                       nondegeneracy, source_poisson_residual, target_anti_poisson_residual)
from .lifted import (J_morphism_residual, action_law_residual, algebroid_morphism_residual, broken_twist_action,
                     double_action_reduction_scenario, equivariance_residual, exactness_residual,
                     hamiltonian_residual, identity_action_residual, infinitesimal_twisted_residual,
                     morphism_law_residual, prop_general_residuals, twisted_inner_residual,
                     twisted_multiplicativity_residual, unit_momentum_residual)
from .algebra import (check_antisymmetry, check_cocycle, check_double, check_jacobi, coboundary_residual,
                      duality_residual)
from .double import FactorizationError, Order, infinitesimal_dressing
from .paths import (DualLiePath, concatenate, convergence_slope, cotangent_path_residual, endpoint,
                    left_translation_lift, momentum_of_path, path_dressing, path_lifted_action,
                    read_csv, reconstruction_errors, split_at_middle,
                    transformation_cotangent_path, write_csv)
from .poisson import (BivectorProvider, coboundary_bivector, group_multiplicativity_residual,
                      infinitesimal_action_residual, jacobi_identity_residual, linearization_residual,
                      poisson_map_residual, random_test_function)
from .reduction import (coisotropy_residual, homogeneous_scenario, pair_quotient_scenario, reduction_alt_check,
                        subalgebra_residual)
from .report import CheckReport, SuiteReport

SUITES = ("algebra", "dressing", "poisson", "groupoid", "lifted", "paths", "reduction", "negative-controls")
SAMPLE_SCALE = 0.7
CONVERGENCE_GRID = (250, 500, 1000, 2000)
LOG_BALL = 0.5


@dataclass
class SuiteConfig:
    """What to run and how; identical configs give identical reports."""

    example_name: str
    suite_name: str = "all"
    samples: int = 200
    seed: int = 0
    tolerances: dict[str, float] = field(default_factory=dict)
    fd_step: float = 1e-5
    output_path: str | None = None
    timing: bool = False

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be positive")
        if self.suite_name != "all" and self.suite_name not in SUITES:
            raise ValueError(f"unknown suite {self.suite_name!r}; choose from {['all', *SUITES]}")


@dataclass
class Outcome:
    residuals: list
    note: str = ""
    signs: dict = field(default_factory=dict)
    n_samples: int | None = None


@dataclass
class Context:
    ex: Example
    rng: np.random.Generator
    n: int
    h: float
    seed: int
    cache: dict

    def scenario(self, key: str, fn: Callable):
        """Results shared by several checks, computed once with a key-derived seed."""
        if key not in self.cache:
            self.cache[key] = fn(np.random.default_rng(_seed_words(self.seed, key)), self.n)
        return self.cache[key]


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    tolerance: float | Callable[[Example], float]
    what: str
    run: Callable[[Context], Outcome | list]
    applies: Callable[[Example], bool]
    max_samples: int | None = None
    expect_fail: bool = False

    @property
    def key(self) -> str:
        return f"{self.suite}/{self.name}"

    def default_tolerance(self, ex: Example) -> float:
        return self.tolerance(ex) if callable(self.tolerance) else self.tolerance


REGISTRY: list[Check] = []


def _register(suite, name, tol, what, applies=None, max_samples=None, expect_fail=False):
    def deco(fn):
        REGISTRY.append(Check(suite, name, tol, what, fn, applies or _always, max_samples, expect_fail))
        return fn
    return deco


def _seed_words(seed: int, key: str) -> list[int]:
    s = int(seed) & (2 ** 64 - 1)
    return [s & 0xFFFFFFFF, s >> 32, zlib.crc32(key.encode())]


# ---------------------------------------------------------------- applicability


def _always(ex):
    return True


def _has_r(ex):
    return ex.bialgebra.r_matrix is not None


def _nonabelian_dual(ex):
    return bool(np.abs(ex.bialgebra.dual.c).max(initial=0.0) > 0)


def _kind(*kinds):
    return lambda ex: ex.groupoid_kind in kinds


def _has_groupoid(ex):
    return ex.groupoid_kind is not None


def _has_morphism(ex):
    return ex.groupoid_kind in ("pair", "cotangent")


def _hopf(ex):
    return ex.subgroup is not None and ex.subgroup.slice == "hopf_torus" and ex.groupoid_kind == "transformation"


def _has_subgroup(ex):
    return ex.subgroup is not None


def _poisson_lie(ex: Example) -> BivectorProvider:
    """pi_G from the r-matrix when there is one, otherwise from the double."""
    if ex.bialgebra.r_matrix is not None:
        return coboundary_bivector(ex.bialgebra, ex.dm.g_model)
    return BivectorProvider(GroupManifold(ex.dm.g_model), ex.dm.dressing_bivector, "CUSTOM")


def _rand(ctx: Context, model):
    return model.random_element(ctx.rng, SAMPLE_SCALE)


def _vec(ctx: Context, n: int):
    return ctx.rng.uniform(-SAMPLE_SCALE, SAMPLE_SCALE, n)


# ---------------------------------------------------------------- algebra


def _alg_report(rep: CheckReport) -> Outcome:
    return Outcome([rep.max_residual], n_samples=rep.n_samples)


for _lbl, _attr in (("primal", "primal"), ("dual", "dual")):
    _register("algebra", f"jacobi_{_lbl}", 1e-12, f"Jacobi identity of the {_lbl} constants over all basis triples")(
        lambda ctx, a=_attr: _alg_report(check_jacobi(getattr(ctx.ex.bialgebra, a))))
    _register("algebra", f"antisymmetry_{_lbl}", 1e-12, f"antisymmetry of the {_lbl} constants")(
        lambda ctx, a=_attr: _alg_report(check_antisymmetry(getattr(ctx.ex.bialgebra, a))))


@_register("algebra", "cocycle", 1e-12, "cobracket is a 1-cocycle for the adjoint action on bivectors")
def _cocycle(ctx):
    return _alg_report(check_cocycle(ctx.ex.bialgebra))


@_register("algebra", "duality", 1e-12, "<delta(x), xi ^ eta> = <x, [xi, eta]_*> on basis elements")
def _duality(ctx):
    return Outcome([duality_residual(ctx.ex.bialgebra)], n_samples=ctx.ex.bialgebra.dim ** 3)


@_register("algebra", "coboundary", 1e-12, "cobracket equals the coboundary of the r-matrix", _has_r)
def _coboundary(ctx):
    return Outcome([coboundary_residual(ctx.ex.bialgebra)], n_samples=ctx.ex.bialgebra.dim)


for _i, _name in enumerate(("double_jacobi", "double_antisymmetry", "pairing_invariance", "isotropy", "subalgebras")):
    _register("algebra", _name, 1e-12, f"{_name.replace('_', ' ')} of the double Lie algebra")(
        lambda ctx, i=_i: _alg_report(check_double(ctx.ex.double_algebra)[i]))


@_register("algebra", "generator_embedding", 1e-12, "generators of D reproduce the double's structure constants")
def _embedding(ctx):
    return Outcome([ctx.ex.dm.embedding_residual(ctx.ex.double_algebra)])


def _group_models(ctx):
    return (ctx.ex.dm.g_model, ctx.ex.dm.gstar_model)


@_register("algebra", "group_inverse", 1e-13, "g g^-1 = I and associativity of matrix products")
def _group_inverse(ctx):
    out = []
    for _ in range(ctx.n):
        for m in _group_models(ctx):
            a, b, c = _rand(ctx, m), _rand(ctx, m), _rand(ctx, m)
            out.append(max(np.abs(a @ m.inverse(a) - m.identity()).max(), np.abs((a @ b) @ c - a @ (b @ c)).max()))
    return out


@_register("algebra", "exp_log_roundtrip", 1e-10, "exp(log g) = g and log(exp v) = v for |v| <= 0.5")
def _exp_log(ctx):
    out = []
    for _ in range(ctx.n):
        for m in _group_models(ctx):
            v = _vec(ctx, m.dim)
            v *= min(1.0, LOG_BALL / np.linalg.norm(v))
            g = m.exp(v)
            out.append(max(np.abs(m.log(g) - v).max(), np.abs(m.exp(m.log(g)) - g).max()))
    return out


@_register("algebra", "adjoint_homomorphism", 1e-11, "Ad_{gk} = Ad_g Ad_k and Ad_exp(v) = expm(-ad_v)")
def _adjoint(ctx):
    from scipy.linalg import expm
    out = []
    for _ in range(ctx.n):
        for m, alg in zip(_group_models(ctx), (ctx.ex.bialgebra.primal, ctx.ex.bialgebra.dual)):
            g, k, v = _rand(ctx, m), _rand(ctx, m), _vec(ctx, m.dim)
            out.append(max(np.abs(m.adjoint(g @ k) - m.adjoint(g) @ m.adjoint(k)).max(),
                           np.abs(m.adjoint(m.exp(v)) - expm(-alg.ad(v))).max()))
    return out


@_register("algebra", "coadjoint_pairing", 1e-12, "<Ad*_g xi, Ad_g x> = <xi, x>")
def _coadjoint(ctx):
    out = []
    for _ in range(ctx.n):
        for m in _group_models(ctx):
            g, xi, x = _rand(ctx, m), _vec(ctx, m.dim), _vec(ctx, m.dim)
            out.append(abs((m.coadjoint_star(g) @ xi) @ (m.adjoint(g) @ x) - xi @ x))
    return out


@_register("algebra", "membership", 1e-9, "sampled elements lie in their groups")
def _membership(ctx):
    return [m.membership_residual(_rand(ctx, m)) for _ in range(ctx.n) for m in _group_models(ctx)]


# ---------------------------------------------------------------- dressing


def _rand_d(ctx):
    return ctx.ex.dm.d_model.exp(_vec(ctx, 2 * ctx.ex.dm.n))


def _on_factorizable(ctx: Context, one: Callable[[], float]) -> Outcome:
    """Evaluate ``one`` per sample, skipping samples outside the factorizable set of an incomplete double."""
    out, skipped = [], 0
    for _ in range(ctx.n):
        try:
            out.append(one())
        except FactorizationError:
            if ctx.ex.complete:
                raise
            skipped += 1
    if not out:
        raise FactorizationError("no sample was factorizable")
    note = f"{skipped} of {ctx.n} samples outside the factorizable set" if skipped else ""
    return Outcome(out, note=note)


@_register("dressing", "factorization_roundtrip", 1e-11, "both factorizations of random d multiply back to d")
def _fact_roundtrip(ctx):
    dm = ctx.ex.dm

    def one():
        d = _rand_d(ctx)
        return max(np.abs(dm.factorize(d, o).product() - d).max() for o in Order)
    return _on_factorizable(ctx, one)


@_register("dressing", "factorization_uniqueness", 1e-11,
           "refactorizing the product of factors returns them; elements of G and G* factor trivially")
def _fact_unique(ctx):
    dm = ctx.ex.dm

    def one():
        f = dm.factorize(_rand_d(ctx))
        f2 = dm.factorize(f.product())
        g, u = _rand(ctx, dm.g_model), _rand(ctx, dm.gstar_model)
        fg, fu = dm.factorize(g), dm.factorize(u)
        return max(np.abs(f.gstar_part - f2.gstar_part).max(), np.abs(f.g_part - f2.g_part).max(),
                   np.abs(fg.g_part - g).max(), np.abs(fg.gstar_part - dm.gstar_model.identity()).max(),
                   np.abs(fu.gstar_part - u).max(), np.abs(fu.g_part - dm.g_model.identity()).max())
    return _on_factorizable(ctx, one)


@_register("dressing", "dressing_trivial_cases", 1e-12, "dressing by the identity on either side is trivial")
def _dress_trivial(ctx):
    dm = ctx.ex.dm

    def one():
        g, u = _rand(ctx, dm.g_model), _rand(ctx, dm.gstar_model)
        e, es = dm.g_model.identity(), dm.gstar_model.identity()
        a, b = dm.dress_g_on_gstar(e, u)
        c, d = dm.dress_g_on_gstar(g, es)
        return max(np.abs(a - u).max(), np.abs(b - e).max(), np.abs(c - es).max(), np.abs(d - g).max())
    return _on_factorizable(ctx, one)


@_register("dressing", "twisted_law_gstar", 1e-10, "^g(u1 u2) = (^g u1)(^{g^u1} u2)")
def _twisted_gstar(ctx):
    dm = ctx.ex.dm

    def one():
        g, u1, u2 = _rand(ctx, dm.g_model), _rand(ctx, dm.gstar_model), _rand(ctx, dm.gstar_model)
        lhs = dm.left_dressing_on_gstar(g, u1 @ u2)
        rhs = dm.left_dressing_on_gstar(g, u1) @ dm.left_dressing_on_gstar(dm.right_dressing_on_g(g, u1), u2)
        return np.abs(lhs - rhs).max()
    return _on_factorizable(ctx, one)


@_register("dressing", "twisted_law_g", 1e-10, "(g1 g2)^u = g1^{(^g2 u)} g2^u")
def _twisted_g(ctx):
    dm = ctx.ex.dm

    def one():
        g1, g2, u = _rand(ctx, dm.g_model), _rand(ctx, dm.g_model), _rand(ctx, dm.gstar_model)
        lhs = dm.right_dressing_on_g(g1 @ g2, u)
        rhs = dm.right_dressing_on_g(g1, dm.left_dressing_on_gstar(g2, u)) @ dm.right_dressing_on_g(g2, u)
        return np.abs(lhs - rhs).max()
    return _on_factorizable(ctx, one)


@_register("dressing", "dressing_action_law", 1e-10, "left dressing of G on G* is an action")
def _dress_action(ctx):
    dm = ctx.ex.dm

    def one():
        g1, g2, u = _rand(ctx, dm.g_model), _rand(ctx, dm.g_model), _rand(ctx, dm.gstar_model)
        lhs = dm.left_dressing_on_gstar(g1 @ g2, u)
        return np.abs(lhs - dm.left_dressing_on_gstar(g1, dm.left_dressing_on_gstar(g2, u))).max()
    return _on_factorizable(ctx, one)


@_register("dressing", "infinitesimal_dressing_flow", 1e-4,
           "d/dt of ^{exp(t eta)} g matches pi_G^#(eta^R) (step 1e-4)")
def _inf_dressing(ctx):
    dm = ctx.ex.dm
    pi = _poisson_lie(ctx.ex)
    gm = GroupManifold(dm.g_model)
    h = 1e-4

    def one():
        g, eta = _rand(ctx, dm.g_model), _vec(ctx, dm.n)
        fd = (gm.local(g, dm.left_dressing_on_g(dm.gstar_model.exp(h * eta), g))
              - gm.local(g, dm.left_dressing_on_g(dm.gstar_model.exp(-h * eta), g))) / (2 * h)
        return np.abs(fd - infinitesimal_dressing(pi, eta, g)).max()
    return _on_factorizable(ctx, one)


# ---------------------------------------------------------------- poisson


@_register("poisson", "bivector_antisymmetry", 1e-12, "raw bivector evaluations are antisymmetric")
def _biv_skew(ctx):
    pi = _poisson_lie(ctx.ex)
    out = []
    for _ in range(ctx.n):
        m = np.asarray(pi.raw(_rand(ctx, ctx.ex.dm.g_model)))
        out.append(np.abs(m + m.T).max())
    return out


@_register("poisson", "vanishes_at_identity", 1e-14, "pi_G(e) = 0")
def _vanish(ctx):
    return [np.abs(_poisson_lie(ctx.ex).evaluate(ctx.ex.dm.g_model.identity())).max()]


@_register("poisson", "bivector_two_routes", 1e-12,
           "r-matrix bivector equals the bivector read off the double's adjoint action", _has_r)
def _two_routes(ctx):
    dm = ctx.ex.dm
    pr = coboundary_bivector(ctx.ex.bialgebra, dm.g_model)
    out = []
    for _ in range(ctx.n):
        g = _rand(ctx, dm.g_model)
        out.append(np.abs(pr.evaluate(g) - dm.dressing_bivector(g)).max())
    return out


@_register("poisson", "multiplicativity", 1e-8, "pi(gk) = L_g pi(k) + R_k pi(g)")
def _pl_mult(ctx):
    pi = _poisson_lie(ctx.ex)
    m = ctx.ex.dm.g_model
    return [group_multiplicativity_residual(pi, m, _rand(ctx, m), _rand(ctx, m), h=ctx.h) for _ in range(ctx.n)]


@_register("poisson", "jacobi", 1e-4, "Jacobi identity of pi_G by nested central differences", max_samples=100)
def _pl_jacobi(ctx):
    pi = _poisson_lie(ctx.ex)
    m = ctx.ex.dm.g_model
    size = m.rep_dim ** 2
    out = []
    for _ in range(ctx.n):
        fs = [random_test_function(ctx.rng, size) for _ in range(3)]
        out.append(jacobi_identity_residual(pi, _rand(ctx, m), *fs))
    return out


@_register("poisson", "linearization", 1e-6, "derivative of pi_G at e equals the cobracket")
def _pl_lin(ctx):
    p, bi, m = _poisson_lie(ctx.ex), ctx.ex.bialgebra, ctx.ex.dm.g_model
    return [linearization_residual(p, bi, m, h=ctx.h, directions=_vec(ctx, m.dim)) for _ in range(ctx.n)]


@_register("poisson", "multiplication_poisson_map", 1e-8, "group multiplication G x G -> G is a Poisson map",
           max_samples=50)
def _mult_map(ctx):
    pi = _poisson_lie(ctx.ex)
    m = ctx.ex.dm.g_model
    gm = GroupManifold(m)
    prod = BivectorProvider(ProductManifold([gm, gm]), lambda x: block_diag(pi.evaluate(x[0]), pi.evaluate(x[1])))
    return [poisson_map_residual(prod, pi, lambda x: x[0] @ x[1], (_rand(ctx, m), _rand(ctx, m)), h=ctx.h)
            for _ in range(ctx.n)]


@_register("poisson", "left_translation_poisson_action", 1e-4,
           "left translation is an infinitesimal Poisson action: L_psi pi = (psi ^ psi) delta", max_samples=10)
def _left_action(ctx):
    pi = _poisson_lie(ctx.ex)
    m = ctx.ex.dm.g_model
    # in the chart exp(v) y, the fundamental field of left translation has components xi
    return [infinitesimal_action_residual(ctx.ex.bialgebra, pi, lambda xi, y: xi, _vec(ctx, m.dim), _rand(ctx, m))
            for _ in range(ctx.n)]


# ---------------------------------------------------------------- groupoid


def _axiom_tol(ex):
    return 1e-9 if ex.groupoid_kind == "transformation" else 1e-10


def _axioms(ctx):
    return ctx.scenario("axioms", lambda rng, n: [axiom_residuals(ctx.ex.groupoid, rng) for _ in range(n)])


for _ax in ("associativity", "unit", "inverse", "source_target", "unit_section"):
    _register("groupoid", f"axiom_{_ax}", _axiom_tol, f"groupoid axiom: {_ax.replace('_', ' ')}", _has_groupoid)(
        lambda ctx, a=_ax: [r[a] for r in _axioms(ctx)])


@_register("groupoid", "source_poisson", 1e-6, "source map is Poisson onto the base", _has_groupoid, 100)
def _s_poisson(ctx):
    gm = ctx.ex.groupoid
    return [source_poisson_residual(gm, gm.sample_point(ctx.rng)) for _ in range(ctx.n)]


@_register("groupoid", "target_anti_poisson", 1e-6, "target map is anti-Poisson onto the base", _has_groupoid, 100)
def _t_poisson(ctx):
    gm = ctx.ex.groupoid
    return [target_anti_poisson_residual(gm, gm.sample_point(ctx.rng)) for _ in range(ctx.n)]


@_register("groupoid", "base_is_poisson_lie", 1e-6,
           "source pushforward of the total bivector equals the r-matrix bivector on G",
           lambda ex: _has_r(ex) and ex.groupoid_kind == "transformation", 100)
def _base_pl(ctx):
    gm = ctx.ex.groupoid
    pr = coboundary_bivector(ctx.ex.bialgebra, ctx.ex.dm.g_model)
    return [poisson_map_residual(gm.total_bivector, pr, gm.source, gm.sample_point(ctx.rng), h=ctx.h)
            for _ in range(ctx.n)]


@_register("groupoid", "multiplicativity", 1e-5, "graph of multiplication is coisotropic", _has_groupoid, 50)
def _gpd_mult(ctx):
    gm = ctx.ex.groupoid
    return [check_multiplicativity(gm, *gm.sample_composable(ctx.rng), h=ctx.h) for _ in range(ctx.n)]


@_register("groupoid", "nondegeneracy", 1e8, "inverse |det| of the total bivector (bounded means symplectic)",
           _has_groupoid, 100)
def _nondeg(ctx):
    gm = ctx.ex.groupoid
    return [1.0 / max(nondegeneracy(gm, gm.sample_point(ctx.rng)), 1e-300) for _ in range(ctx.n)]


@_register("groupoid", "heisenberg_sign_selection", 0.5,
           "exactly one sign of the Heisenberg bivector passes; the other fails some check by >= 1e-2",
           _kind("transformation"), 20)
def _sign_sel(ctx):
    scan = heisenberg_sign_scan(ctx.ex.dm, ctx.rng, samples=ctx.n)
    accepted = scan["accepted"]
    ok = accepted is not None
    if ok:
        rej = scan[-accepted]
        margin = max(rej["source_poisson"], rej["target_anti_poisson"], rej["multiplicativity"],
                     1e-2 if rej["min_abs_det"] <= 1e-8 else 0.0)
        ok = margin >= 1e-2
    signs = {str(k): v for k, v in scan.items()}
    return Outcome([0.0 if ok else 1.0], note=f"accepted sign {accepted}", signs=signs, n_samples=ctx.n)


# ---------------------------------------------------------------- lifted


def _lam(ctx):
    return ctx.ex.lifted


def _lifted_loop(ctx, fn):
    lam = _lam(ctx)
    gm = lam.groupoid
    out = []
    for _ in range(ctx.n):
        x, y = gm.sample_composable(ctx.rng)
        g1, g2 = _rand(ctx, lam.group), _rand(ctx, lam.group)
        out.append(fn(lam, g1, g2, x, y))
    return out


@_register("lifted", "action_law", 1e-9, "(g1 g2) x = g1 (g2 x)", _has_groupoid)
def _act_law(ctx):
    return _lifted_loop(ctx, lambda lam, g1, g2, x, y: action_law_residual(lam, g1, g2, x))


@_register("lifted", "identity_action", 1e-9, "e x = x", _has_groupoid)
def _id_act(ctx):
    return _lifted_loop(ctx, lambda lam, g1, g2, x, y: identity_action_residual(lam, x))


@_register("lifted", "unit_momentum", 1e-9, "J(1_m) = e", _has_groupoid)
def _unit_mom(ctx):
    lam = _lam(ctx)
    return [unit_momentum_residual(lam, lam.groupoid.sample_base(ctx.rng)) for _ in range(ctx.n)]


@_register("lifted", "J_morphism", 1e-9, "J(x y) = J(x) J(y)", _has_groupoid)
def _j_morph(ctx):
    return _lifted_loop(ctx, lambda lam, g1, g2, x, y: J_morphism_residual(lam, x, y))


@_register("lifted", "equivariance", 1e-9, "J(g x) = ^g J(x)", _has_groupoid)
def _equiv(ctx):
    return _lifted_loop(ctx, lambda lam, g1, g2, x, y: equivariance_residual(lam, g1, x))


@_register("lifted", "twisted_multiplicativity", 1e-9, "g(x y) = (g x)(g^{J(x)} y)", _has_groupoid)
def _twisted(ctx):
    return _lifted_loop(ctx, lambda lam, g1, g2, x, y: twisted_multiplicativity_residual(lam, g1, x, y))


@_register("lifted", "morphism_implies_twisted", 1e-9,
           "at samples where J is multiplicative, the action is twisted multiplicative", _has_groupoid)
def _morph_implies(ctx):
    def one(lam, g1, g2, x, y):
        if J_morphism_residual(lam, x, y) > 1e-9:
            return 0.0
        return twisted_multiplicativity_residual(lam, g1, x, y)
    return _lifted_loop(ctx, one)


@_register("lifted", "infinitesimal_twisted", 1e-4,
           "psi(xi) at x y is the product of psi(xi) at x and psi(xi') at y", _has_groupoid, 50)
def _inf_twisted(ctx):
    lam = _lam(ctx)
    out = []
    for _ in range(ctx.n):
        x, y = lam.groupoid.sample_composable(ctx.rng)
        out.append(infinitesimal_twisted_residual(lam, _vec(ctx, lam.group.dim), x, y, h=ctx.h))
    return out


@_register("lifted", "hamiltonian", 1e-4, "psi(xi) = Pi^#(J^* xi^R)", _has_groupoid, 50)
def _hamiltonian(ctx):
    lam = _lam(ctx)
    return [hamiltonian_residual(lam, _vec(ctx, lam.group.dim), lam.groupoid.sample_point(ctx.rng))
            for _ in range(ctx.n)]


def _prop(ctx):
    def run(rng, n):
        lam = _lam(ctx)
        return [prop_general_residuals(lam, lam.group.random_element(rng, SAMPLE_SCALE),
                                       lam.groupoid.sample_point(rng)) for _ in range(n)]
    return ctx.scenario("prop_general", run)


for _key, _what in (("unit", "g 1_m = 1_{g m}"), ("target", "t(g x) = g t(x)"),
                    ("source", "s(g x) = g^{J(x)} s(x)"), ("inverse", "(g x)^-1 = g^{J(x)} x^-1"),
                    ("odot", "the action g (.) x = (g x^-1)^-1 covers g on sources and fixes units")):
    _register("lifted", f"induced_{_key}", 1e-9, _what, _has_groupoid)(lambda ctx, k=_key: [r[k] for r in _prop(ctx)])


@_register("lifted", "cotangent_lift_exact", 1e-8,
           "the lifted action is the cotangent lift of the base action", _kind("cotangent"))
def _cot_exact(ctx):
    lam = _lam(ctx)
    gm = lam.groupoid
    base = gm.base
    out = []
    for _ in range(ctx.n):
        x, g = gm.sample_point(ctx.rng), _rand(ctx, lam.group)
        jac = pushforward_in_chart(lambda m: lam.base_act(g, m), base, x.m, base, h=ctx.h)
        gx = lam.act(g, x)
        out.append(max(np.abs(gx.m - lam.base_act(g, x.m)).max(), np.abs(jac.T @ gx.p - x.p).max()))
    return out


@_register("lifted", "exactness", 1e-9, "J(x) = mu(s(x)) mu(t(x))^-1", _has_morphism)
def _exact(ctx):
    agm = ctx.ex.morphism
    return [exactness_residual(agm, agm.lam.groupoid.sample_point(ctx.rng)) for _ in range(ctx.n)]


@_register("lifted", "twisted_inner_action", 1e-9, "g x = Psi(g, t x) x Psi(g^{J(x)}, s x)^-1", _has_morphism)
def _inner(ctx):
    agm = ctx.ex.morphism
    lam = agm.lam
    return [twisted_inner_residual(agm, _rand(ctx, lam.group), lam.groupoid.sample_point(ctx.rng))
            for _ in range(ctx.n)]


@_register("lifted", "morphism_law", 1e-9, "Psi(g k, m) = Psi(g, k m) Psi(k, m)", _has_morphism)
def _morph_law(ctx):
    agm = ctx.ex.morphism
    lam = agm.lam
    return [morphism_law_residual(agm, _rand(ctx, lam.group), _rand(ctx, lam.group),
                                  lam.groupoid.sample_base(ctx.rng)) for _ in range(ctx.n)]


@_register("lifted", "algebroid_morphism", 1e-5,
           "d/dt Psi(exp(t xi), m) is vertical for s with anchor pi^#(mu^* xi^R)", _kind("pair"))
def _algd(ctx):
    agm = ctx.ex.morphism
    lam = agm.lam
    return [algebroid_morphism_residual(agm, _vec(ctx, lam.group.dim), lam.groupoid.sample_base(ctx.rng))
            for _ in range(ctx.n)]


# ---------------------------------------------------------------- paths


def _oracle_vectors(n: int):
    a = np.resize([3.0, -2.5, 2.5], n)
    b = np.resize([2.5, 2.5, -2.0], n)
    return a, b


def _random_path(ctx, n: int, N: int) -> DualLiePath:
    a, b, c = (_vec(ctx, n) for _ in range(3))
    return DualLiePath.from_function(lambda t: a + t * b + np.sin(2 * np.pi * t) * c, N)


@_register("paths", "reconstruction_order", 0.5,
           "4 minus the fitted convergence order of RK4 reconstruction on an exact oracle", _nonabelian_dual)
def _order(ctx):
    model = ctx.ex.dm.gstar_model
    a, b = _oracle_vectors(model.dim)
    errs = reconstruction_errors(model, a, b, CONVERGENCE_GRID)
    slope = convergence_slope(CONVERGENCE_GRID, errs)
    return Outcome([max(0.0, 4.0 - slope)], note=f"slope {slope:.3f}; errors {', '.join(f'{e:.2e}' for e in errs)}",
                   n_samples=len(CONVERGENCE_GRID))


@_register("paths", "concatenation_momentum", 1e-6, "endpoint of a concatenation is J(second) J(first)",
           max_samples=10)
def _concat(ctx):
    m = ctx.ex.dm.gstar_model
    out = []
    for _ in range(ctx.n):
        p1, p2 = _random_path(ctx, m.dim, 200), _random_path(ctx, m.dim, 200)
        out.append(np.abs(endpoint(concatenate(p1, p2), m) - endpoint(p2, m) @ endpoint(p1, m)).max())
    return out


@_register("paths", "split_consistency", 1e-6, "splitting at t = 1/2 and recombining preserves the endpoint",
           max_samples=10)
def _split(ctx):
    m = ctx.ex.dm.gstar_model
    out = []
    for _ in range(ctx.n):
        p = _random_path(ctx, m.dim, 400)
        first, second = split_at_middle(p)
        out.append(np.abs(endpoint(p, m) - endpoint(second, m) @ endpoint(first, m)).max())
    return out


@_register("paths", "csv_roundtrip", 0.0, "paths survive a CSV round trip bit for bit", max_samples=1)
def _csv(ctx):
    p = _random_path(ctx, ctx.ex.dm.n, 20)
    with tempfile.TemporaryDirectory() as d:
        f = Path(d) / "path.csv"
        write_csv(f, p)
        q = read_csv(f)
    return [float(np.abs(p.samples - q.samples).max() + abs(p.t1 - q.t1) + abs(p.t0 - q.t0))]


@_register("paths", "dressing_endpoint", 1e-5,
           "path dressing by g reconstructs to the dressing ^g u(1) at N = 2000", _kind("transformation"), 3)
def _path_dress(ctx):
    dm = ctx.ex.dm
    out = []
    for _ in range(ctx.n):
        p, g = _random_path(ctx, dm.n, 2000), _rand(ctx, dm.g_model)
        u1 = endpoint(p, dm.gstar_model)
        out.append(np.abs(endpoint(path_dressing(dm, g, p), dm.gstar_model)
                          - dm.left_dressing_on_gstar(g, u1)).max())
    return out


def _cotangent_path(ctx, N):
    dm = ctx.ex.dm
    p, g0 = _random_path(ctx, dm.n, N), _rand(ctx, dm.g_model)
    return p, g0, transformation_cotangent_path(dm, p, g0)


@_register("paths", "momentum_roundtrip", 1e-6, "J([a]) from the path of momenta equals u(1)",
           _kind("transformation"), 3)
def _mom_rt(ctx):
    dm = ctx.ex.dm
    out = []
    for _ in range(ctx.n):
        p, g0, cp = _cotangent_path(ctx, 500)
        j = lambda x, a: a
        out.append(np.abs(momentum_of_path(j, cp, dm.gstar_model) - endpoint(p, dm.gstar_model)).max())
    return out


@_register("paths", "cotangent_condition", 1e-5, "base path velocity equals pi^#(a) along sampled cotangent paths",
           _kind("transformation"), 3)
def _cot_cond(ctx):
    gm = ctx.ex.groupoid
    return [cotangent_path_residual(_cotangent_path(ctx, 1000)[2], gm.base, gm.base_bivector) for _ in range(ctx.n)]


@_register("paths", "lifted_endpoint", 1e-5,
           "path-level lifted action reconstructs to the closed-form action on G* x G at N = 2000",
           _kind("transformation"), 3)
def _lifted_end(ctx):
    dm = ctx.ex.dm
    lam = ctx.ex.lifted
    out = []
    for _ in range(ctx.n):
        p, g0, cp = _cotangent_path(ctx, 2000)
        g = _rand(ctx, dm.g_model)
        j = lambda x, a: a
        moved = path_lifted_action(dm, j, g, cp, left_translation_lift(dm))
        expect = lam.act(g, TransfPoint(endpoint(p, dm.gstar_model), g0))
        got_u = momentum_of_path(j, moved, dm.gstar_model)
        out.append(max(np.abs(got_u - expect.u).max(), np.abs(moved.base[0] - expect.g).max()))
    return out


@_register("paths", "lifted_preserves_condition", 0.2,
           "2 minus the fitted order at which cotangent paths moved by the lifted action satisfy "
           "the cotangent condition", _kind("transformation"), 3)
def _lifted_cond(ctx):
    dm = ctx.ex.dm
    gm = ctx.ex.groupoid
    grid = (125, 250, 500)
    out, slopes = [], []
    for _ in range(ctx.n):
        a, b, c = (_vec(ctx, dm.n) for _ in range(3))
        g0, g = _rand(ctx, dm.g_model), _rand(ctx, dm.g_model)
        errs = []
        for N in grid:
            p = DualLiePath.from_function(lambda t: a + t * b + np.sin(2 * np.pi * t) * c, N)
            moved = path_lifted_action(dm, lambda x, a: a, g, transformation_cotangent_path(dm, p, g0),
                                       left_translation_lift(dm))
            errs.append(cotangent_path_residual(moved, gm.base, gm.base_bivector))
        slopes.append(convergence_slope(grid, errs))
        out.append(max(0.0, 2.0 - slopes[-1]))
    return Outcome(out, note=f"orders {', '.join(f'{s:.3f}' for s in slopes)}")


# ---------------------------------------------------------------- reduction


@_register("reduction", "coisotropy", 1e-12, "annihilator of h is a subalgebra of g*", _has_subgroup)
def _coiso(ctx):
    return [coisotropy_residual(ctx.ex.bialgebra, ctx.ex.subgroup.h_basis)]


@_register("reduction", "h_subalgebra", 1e-12, "h is a subalgebra of g", _has_subgroup)
def _hsub(ctx):
    return [subalgebra_residual(ctx.ex.bialgebra, ctx.ex.subgroup.h_basis)]


_HOMOGENEOUS = {
    "closure": (1e-9, "(a) products of level-set points stay in H-perp x G"),
    "h_action": (1e-9, "(b) the H-action preserves H-perp x G"),
    "projection_idempotent": (1e-9, "canonical representative of a representative is itself"),
    "projection_invariance": (1e-9, "slice coordinates are constant on H-orbits"),
    "product_compatibility": (1e-9, "(c) aligned products of representatives represent the product"),
    "twisted_on_H": (1e-9, "twisted multiplicativity for elements of H on the level set"),
    "orbit_in_kernel": (1e-6, "H-orbit directions are in the kernel of the form restricted to the level set"),
    "reduced_jacobi": (1e-4, "(d) Jacobi identity of the reduced bivector on the slice"),
    "quotient_poisson_map": (1e-5, "(d) G -> H\\G is Poisson onto the source image of the reduced bivector"),
    "base_well_defined": (1e-9, "source image of the reduced bivector does not depend on the fiber coordinate"),
}


def _homog(ctx):
    ex = ctx.ex
    return ctx.scenario("homogeneous", lambda rng, n: homogeneous_scenario(ex.lifted, ex.subgroup, ex.bialgebra,
                                                                           rng, samples=n))


for _key, (_tol, _what) in _HOMOGENEOUS.items():
    _register("reduction", f"homogeneous_{_key}", _tol, _what, _hopf, 50)(
        lambda ctx, k=_key: Outcome([_homog(ctx)[k]], n_samples=ctx.n))


_PAIR_QUOTIENT = {
    "multiplicativity": (1e-5, "reduced bivector on J^-1(0)/G is multiplicative"),
    "base_bracket": (1e-6, "source image of the reduced bivector equals the quotient bracket of invariants"),
    "target_anti_poisson": (1e-6, "reduced target map is anti-Poisson"),
    "axioms": (1e-10, "groupoid axioms of the reduced groupoid"),
    "gauge_invariance": (1e-9, "slice coordinates are G-invariant"),
    "nondegenerate": (1e8, "inverse |det| of the reduced form"),
}


def _pairq(ctx):
    ex = ctx.ex
    return ctx.scenario("pair_quotient", lambda rng, n: pair_quotient_scenario(
        ex.morphism, ex.groupoid_config["momentum"], rng, samples=n))


for _key, (_tol, _what) in _PAIR_QUOTIENT.items():
    _register("reduction", f"pair_quotient_{_key}", _tol, _what, _kind("pair"), 50)(
        lambda ctx, k=_key: Outcome([_pairq(ctx)[k]], n_samples=ctx.n))


_DOUBLE_ACTION = {
    "action_formula": (1e-9, "(g1, g2) x = (g1 m1, g2^{J(x)} m2) on the pair model"),
    "level_set_agreement": (0.0, "level set of the double momentum is J^-1(e) over mu^-1(e)"),
    "rank": (0.0, "level set of the double momentum has the expected codimension"),
    "orbit_in_kernel": (1e-9, "G x G orbit directions are in the kernel of the form on the level set"),
    "slice_form": (1e-9, "restricted form on the slice is the pair structure of the reduced base"),
    "subgroupoid": (1e-9, "products of slice points stay in the slice"),
    "reduced_dim": (0.0, "reduced space has dimension 2 (dim M - 2 dim G)"),
}


def _dact(ctx):
    def run(rng, n):
        out = double_action_reduction_scenario(ctx.ex.morphism, rng, samples=n)
        n2, k = ctx.ex.groupoid.base.dim, ctx.ex.dm.n
        out["reduced_dim"] = abs(out["reduced_dim"] - 2 * (n2 - 2 * k))
        return out
    return ctx.scenario("double_action", run)


for _key, (_tol, _what) in _DOUBLE_ACTION.items():
    _register("reduction", f"double_action_{_key}", _tol, _what, _kind("pair"), 50)(
        lambda ctx, k=_key: Outcome([_dact(ctx)[k]], n_samples=ctx.n))


@_register("reduction", "symplectization_reduction_K_m", 0.0,
           "comparison of symplectization and reduction through K_m (documented, not computed)")
def _km(ctx):
    return reduction_alt_check()


# ---------------------------------------------------------------- negative controls


@_register("negative-controls", "broken_twist_twisted_multiplicativity", 1e-2,
           "an action without the dressing twist must break twisted multiplicativity",
           _kind("transformation"), expect_fail=True)
def _broken(ctx):
    lam = broken_twist_action(ctx.ex.groupoid)
    gm = lam.groupoid
    out = []
    for _ in range(ctx.n):
        x, y = gm.sample_composable(ctx.rng)
        out.append(twisted_multiplicativity_residual(lam, _rand(ctx, lam.group), x, y))
    return out


@_register("negative-controls", "broken_twist_J_morphism", 1e-9,
           "the broken action still has a multiplicative J", _kind("transformation"))
def _broken_j(ctx):
    lam = broken_twist_action(ctx.ex.groupoid)
    return [J_morphism_residual(lam, *lam.groupoid.sample_composable(ctx.rng)) for _ in range(ctx.n)]


@_register("negative-controls", "wrong_heisenberg_sign", 1e-6,
           "the rejected Heisenberg sign fails the Poisson, multiplicativity or nondegeneracy checks",
           _kind("transformation"), 20, expect_fail=True)
def _wrong_sign(ctx):
    gm = TransformationGroupoid(ctx.ex.dm, -ctx.ex.groupoid.sign)
    out = []
    for _ in range(ctx.n):
        x = gm.sample_point(ctx.rng)
        det = nondegeneracy(gm, x)
        out.append(max(source_poisson_residual(gm, x), target_anti_poisson_residual(gm, x),
                       check_multiplicativity(gm, *gm.sample_composable(ctx.rng)),
                       1.0 if det < 1e-8 else 0.0))
    return Outcome(out, signs={"tested": -ctx.ex.groupoid.sign})


def corrupt_constants(data: dict) -> dict:
    """Copy of a parsed example with a symmetric perturbation of the primal constants."""
    bad = copy.deepcopy(data)
    c = np.asarray(bad["algebra"]["primal"], dtype=float)
    c[0, 0, -1] += 1.0
    if c.shape[0] > 1:
        c[0, -1, 0] += 1.0
    bad["algebra"]["primal"] = c.tolist()
    return bad


@_register("negative-controls", "corrupted_constants_load", 0.5,
           "an example with non-antisymmetric constants loads (1 when refused, so the control must fail)",
           expect_fail=True)
def _corrupt(ctx):
    import sys
    if sys.version_info >= (3, 11):
        import tomllib
    else:
        import tomli as tomllib
    text = Path(ctx.ex.path).read_text()
    try:
        parse_example(text, ctx.ex.path, corrupt_constants(tomllib.loads(text)))
    except ExampleError as exc:
        return Outcome([1.0], note=f"refused: {exc}")
    return Outcome([0.0], note="corrupted example was accepted")


# ---------------------------------------------------------------- running


def checks_for(suite: str) -> list[Check]:
    suites = SUITES if suite == "all" else (suite,)
    return [c for s in suites for c in REGISTRY if c.suite == s]


def _tolerance(check: Check, ex: Example, overrides: dict[str, float]) -> float:
    for key in (check.key, check.name, check.suite):
        if key in overrides:
            return float(overrides[key])
    return check.default_tolerance(ex)


def run_check(check: Check, ex: Example, cfg: SuiteConfig, cache: dict) -> CheckReport:
    n = cfg.samples if check.max_samples is None else min(cfg.samples, check.max_samples)
    rng = np.random.default_rng(_seed_words(cfg.seed, check.key))
    ctx = Context(ex, rng, n, cfg.fd_step, cfg.seed, cache)
    tol = _tolerance(check, ex, cfg.tolerances)
    meta = dict(suite=check.suite, example=ex.name, seed=cfg.seed, expect_fail=check.expect_fail)
    t0 = time.perf_counter()
    try:
        res = check.run(ctx)
    except Exception as exc:  # surfaced as a failed check with suite context
        rep = CheckReport(check.name, float("inf"), tol, n_samples=0, status="error",
                          note=f"{type(exc).__name__}: {exc}", **meta)
    else:
        if isinstance(res, CheckReport):
            rep = res
            rep.name = check.name
            for k, v in meta.items():
                setattr(rep, k, v)
        else:
            if not isinstance(res, Outcome):
                res = Outcome(list(res))
            rep = CheckReport.from_residuals(check.name, res.residuals, tol, note=res.note,
                                             sign_choices_recorded=res.signs, **meta)
            if res.n_samples is not None:
                rep.n_samples = res.n_samples
    if cfg.timing:
        rep.wall_time = time.perf_counter() - t0
    return rep


def run_suite(cfg: SuiteConfig) -> SuiteReport:
    """Run every applicable check of ``cfg.suite_name`` on the configured example."""
    t0 = time.perf_counter()
    report = SuiteReport(cfg.suite_name, cfg.example_name, cfg.seed, cfg.samples)
    try:
        ex = load_example(cfg.example_name)
    except (ExampleError, OSError) as exc:
        report.error = f"load: {exc}"
        return report
    report.example = ex.name
    cache: dict = {}
    for check in checks_for(cfg.suite_name):
        if not check.applies(ex):
            continue
        rep = run_check(check, ex, cfg, cache)
        report.checks.append(rep)
        if rep.status == "error" and report.error is None:
            report.error = f"{check.key}: {rep.note}"
    if cfg.timing:
        report.wall_time = time.perf_counter() - t0
    if cfg.output_path:
        Path(cfg.output_path).write_text(report.to_json() + "\n")
    return report


def coverage_manifest(examples: Iterable[Example] = ()) -> list[dict]:
    """One row per registered check: suite, name, default tolerance, purpose and applicable examples."""
    examples = list(examples)
    rows = []
    for c in REGISTRY:
        tol = c.tolerance if not callable(c.tolerance) else "per model"
        rows.append({"suite": c.suite, "check": c.name, "tolerance": tol, "what": c.what,
                     "expect_fail": c.expect_fail,
                     "examples": [ex.name for ex in examples if c.applies(ex)]})
    return rows
