"""Loading worked examples from TOML and wiring them into models.

A file names a Lie bialgebra by structure constants, integrates it by
matrix generators and optionally adds a groupoid and a coisotropic
subgroup. Schema errors name the offending key and its line.
"""
from __future__ import annotations

import re
import sys
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .algebra import (ALGEBRA_TOL, DoubleAlgebraData, LieAlgebraData, LieBialgebraData, build_double,
                      coboundary_residual, duality_residual, jacobi_residual)
from .double import FACTORIZERS, DoubleGroupModel
from .group import MatrixGroupModel, RepresentationError
from .groupoid import CotangentGroupoid, GroupoidModel, PairGroupoid, TransformationGroupoid
from .lifted import (ActionGroupoidMorphism, LiftedActionModel, cotangent_lift_action, pair_diagonal_action,
                     transf_lifted_action, trivial_action, trivial_morphism)
from .reduction import CoisotropicSubgroupData, coisotropic_subgroup, coisotropy_residual

EMBEDDING_TOL = 1e-10
GROUPOID_KINDS = ("transformation", "pair", "cotangent")


class ExampleError(ValueError):
    """A malformed example file; the message carries file and line."""


def _line_of(text: str, key: str, table: str | None = None) -> int:
    lines = text.splitlines()
    start = 0
    if table is not None:
        for i, ln in enumerate(lines):
            if ln.strip() == f"[{table}]":
                start = i
                break
    pat = re.compile(rf"^\s*{re.escape(key)}\s*=")
    for i in range(start, len(lines)):
        if pat.match(lines[i]):
            return i + 1
    return start + 1 if table is not None else 1


@dataclass
class _Reader:
    path: str
    text: str

    def fail(self, msg: str, key: str, table: str | None = None):
        raise ExampleError(f"{self.path}:{_line_of(self.text, key, table)}: {msg}")

    def get(self, data: dict, key: str, table: str | None, kind=None, required: bool = True):
        if key not in data:
            if required:
                where = f"[{table}]" if table else "top level"
                raise ExampleError(f"{self.path}:{_table_line(self.text, table)}: missing key {key!r} in {where}")
            return None
        val = data[key]
        if kind is not None and not isinstance(val, kind):
            self.fail(f"key {key!r} has type {type(val).__name__}", key, table)
        return val

    def array(self, data: dict, key: str, table: str | None, ndim: int, required: bool = True):
        raw = self.get(data, key, table, required=required)
        if raw is None:
            return None
        try:
            arr = np.asarray(raw, dtype=float)
        except (ValueError, TypeError):
            self.fail(f"key {key!r} is not a rectangular numeric array", key, table)
        if arr.ndim != ndim:
            self.fail(f"key {key!r} must be a {ndim}-dimensional array, got {arr.ndim}", key, table)
        return arr


def _table_line(text: str, table: str | None) -> int:
    if table is None:
        return 1
    for i, ln in enumerate(text.splitlines()):
        if ln.strip() == f"[{table}]":
            return i + 1
    return 1


@dataclass(eq=False)
class Example:
    """A loaded example: bialgebra, groups in a double and optional groupoid data."""

    name: str
    description: str
    path: str
    bialgebra: LieBialgebraData
    double_algebra: DoubleAlgebraData
    dm: DoubleGroupModel
    groupoid_config: dict = field(default_factory=dict)
    subgroup: CoisotropicSubgroupData | None = None

    @property
    def complete(self) -> bool:
        return self.dm.complete

    @property
    def groupoid_kind(self) -> str | None:
        return self.groupoid_config.get("kind")

    @cached_property
    def groupoid(self) -> GroupoidModel | None:
        kind = self.groupoid_kind
        if kind == "transformation":
            return TransformationGroupoid(self.dm, self.groupoid_config.get("sign", 1))
        if kind == "pair":
            return PairGroupoid(self.groupoid_config["base_bivector"])
        if kind == "cotangent":
            return CotangentGroupoid(int(self.groupoid_config["base_dim"]))
        return None

    @cached_property
    def lifted(self) -> LiftedActionModel | None:
        gm = self.groupoid
        if gm is None:
            return None
        if self.groupoid_kind == "transformation":
            return transf_lifted_action(gm)
        if self.groupoid_kind == "pair":
            return self.morphism.lam
        return cotangent_lift_action(gm, self.dm, self.groupoid_config["action_generators"])

    @cached_property
    def morphism(self) -> ActionGroupoidMorphism | None:
        """The action groupoid morphism Psi with its base momentum, when the model has one."""
        gm = self.groupoid
        if self.groupoid_kind == "pair":
            return pair_diagonal_action(gm, self.dm, self.groupoid_config["momentum"])[1]
        if self.groupoid_kind == "cotangent":
            # over the zero Poisson base only the trivial action is hamiltonian
            return trivial_morphism(trivial_action(gm, self.dm))
        return None


def _parse_algebra(rd: _Reader, data: dict, key: str, labels) -> LieAlgebraData:
    c = rd.array(data, key, "algebra", 3)
    n = c.shape[0]
    if c.shape != (n, n, n):
        rd.fail(f"{key} constants must have shape (n, n, n), got {c.shape}", key, "algebra")
    skew = float(np.abs(c + c.transpose(0, 2, 1)).max(initial=0.0))
    if skew > ALGEBRA_TOL:
        rd.fail(f"{key} constants are not antisymmetric (residual {skew:.3e})", key, "algebra")
    jac = jacobi_residual(c)
    if jac > ALGEBRA_TOL:
        rd.fail(f"{key} constants violate the Jacobi identity (residual {jac:.3e})", key, "algebra")
    return LieAlgebraData(c, tuple(labels) if labels else ())


def _parse_group(rd: _Reader, data: dict, table: str) -> MatrixGroupModel:
    sec = rd.get(data, table, None, dict)
    gens = rd.array(sec, "generators", table, 3)
    try:
        return MatrixGroupModel(str(sec.get("name", table)), gens, str(sec.get("retraction", "none")))
    except ValueError as exc:
        rd.fail(str(exc), "generators", table)


def load_example(path_or_name: str | Path) -> Example:
    """Load a TOML example by path or by the name of a bundled example."""
    p = Path(path_or_name)
    if p.suffix != ".toml" and not p.exists():
        p = Path(str(resources.files("poisson_lift") / "data" / f"{path_or_name}.toml"))
    if not p.exists():
        raise ExampleError(f"no example {str(path_or_name)!r}; bundled: {', '.join(bundled_examples())}")
    return parse_example(p.read_text(), str(p))


def parse_example(text: str, origin: str = "<string>", data: dict | None = None) -> Example:
    """Build an example from TOML text; ``data`` overrides the parsed table (line numbers still come from text)."""
    if data is None:
        try:
            data = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ExampleError(f"{origin}: {exc}") from None
    rd = _Reader(origin, text)

    name = rd.get(data, "name", None, str)
    complete = rd.get(data, "complete", None, bool)
    alg = rd.get(data, "algebra", None, dict)
    primal = _parse_algebra(rd, alg, "primal", alg.get("labels"))
    dual = _parse_algebra(rd, alg, "dual", alg.get("dual_labels"))
    if primal.dim != dual.dim:
        rd.fail("primal and dual algebras differ in dimension", "dual", "algebra")
    r = rd.array(alg, "r_matrix", "algebra", 2, required=False)
    bi = LieBialgebraData(primal, dual, r, complete)
    if r is not None and coboundary_residual(bi) > ALGEBRA_TOL:
        rd.fail(f"r_matrix does not generate the dual bracket (residual {coboundary_residual(bi):.3e})",
                "r_matrix", "algebra")
    try:
        dd = build_double(bi)
    except ValueError as exc:
        rd.fail(str(exc), "dual", "algebra")
    if duality_residual(bi) > ALGEBRA_TOL:
        rd.fail("dual constants are not compatible with the pairing", "dual", "algebra")

    g_model = _parse_group(rd, data, "group")
    s_model = _parse_group(rd, data, "dual_group")
    if g_model.dim != primal.dim or s_model.dim != dual.dim:
        rd.fail("number of generators does not match the algebra dimension", "generators", "group")
    if g_model.rep_dim != s_model.rep_dim:
        rd.fail("G and G* must act on the same space", "generators", "dual_group")
    dbl = rd.get(data, "double", None, dict)
    fac = rd.get(dbl, "factorizer", "double", str)
    if fac not in FACTORIZERS:
        rd.fail(f"unknown factorizer {fac!r}; choose from {sorted(FACTORIZERS)}", "factorizer", "double")
    d_model = MatrixGroupModel("D", np.concatenate([g_model.generators, s_model.generators]))
    try:
        dm = DoubleGroupModel(g_model, s_model, d_model, fac, complete)
    except ValueError as exc:
        rd.fail(str(exc), "factorizer", "double")
    for lbl, model, alg_data in (("group", g_model, primal), ("dual_group", s_model, dual)):
        try:
            res = float(np.abs(model.algebra().c - alg_data.c).max())
        except RepresentationError as exc:
            rd.fail(f"generators do not close under brackets: {exc}", "generators", lbl)
        if res > EMBEDDING_TOL:
            rd.fail(f"generators do not represent the algebra (residual {res:.3e})", "generators", lbl)
    try:
        emb = dm.embedding_residual(dd)
    except RepresentationError as exc:
        rd.fail(f"generators of G and G* do not span a Lie algebra: {exc}", "generators", "dual_group")
    if emb > EMBEDDING_TOL:
        rd.fail(f"generators do not represent the double (residual {emb:.3e})", "generators", "dual_group")

    gcfg = dict(data.get("groupoid", {}))
    if gcfg:
        kind = rd.get(gcfg, "kind", "groupoid", str)
        if kind not in GROUPOID_KINDS:
            rd.fail(f"unknown groupoid kind {kind!r}; choose from {list(GROUPOID_KINDS)}", "kind", "groupoid")
        if kind == "transformation" and not complete:
            rd.fail("the transformation groupoid needs complete = true", "kind", "groupoid")
        if kind == "pair":
            pi = rd.array(gcfg, "base_bivector", "groupoid", 2)
            if pi.shape[0] != pi.shape[1] or np.abs(pi + pi.T).max() > ALGEBRA_TOL:
                rd.fail("base_bivector must be a square antisymmetric matrix", "base_bivector", "groupoid")
            mom = rd.array(gcfg, "momentum", "groupoid", 2)
            if mom.shape != (primal.dim, pi.shape[0]):
                rd.fail(f"momentum must have shape {(primal.dim, pi.shape[0])}", "momentum", "groupoid")
            if np.abs(primal.c).max(initial=0.0) > 0:
                rd.fail("the pair model supports abelian G only", "kind", "groupoid")
            gcfg["base_bivector"], gcfg["momentum"] = pi, mom
        if kind == "cotangent":
            n = rd.get(gcfg, "base_dim", "groupoid", int)
            gens = rd.array(gcfg, "action_generators", "groupoid", 3)
            if gens.shape != (primal.dim, n, n):
                rd.fail(f"action_generators must have shape {(primal.dim, n, n)}", "action_generators", "groupoid")
            comm = max(np.abs(a @ b - b @ a).max() for a in gens for b in gens)
            if comm > ALGEBRA_TOL:
                rd.fail("action_generators must commute", "action_generators", "groupoid")
            gcfg["action_generators"] = gens

    sub = None
    scfg = data.get("subgroup")
    if scfg is not None:
        h = rd.array(scfg, "h_basis", "subgroup", 2)
        if h.shape[1] != primal.dim:
            rd.fail("h_basis rows must have the algebra dimension", "h_basis", "subgroup")
        try:
            res = coisotropy_residual(bi, h)
        except ValueError as exc:
            rd.fail(str(exc), "h_basis", "subgroup")
        if res > ALGEBRA_TOL:
            rd.fail(f"subgroup is not coisotropic (residual {res:.3e})", "h_basis", "subgroup")
        rel = rd.get(scfg, "relative_complete", "subgroup", bool)
        sub = coisotropic_subgroup(bi, g_model, s_model, h, rel, str(scfg.get("slice", "")))

    return Example(name, str(data.get("description", "")), origin, bi, dd, dm, gcfg, sub)


def bundled_examples() -> list[str]:
    root = resources.files("poisson_lift") / "data"
    return sorted(Path(str(f)).stem for f in root.iterdir() if str(f).endswith(".toml"))
