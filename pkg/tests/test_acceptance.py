"""End-to-end acceptance criteria.

Each test prints one ``ACCEPTANCE <n> PASS|FAIL`` line (visible with ``-s`` or
in the terminal summary) and then asserts the same verdict.
"""
import time

import numpy as np
import pytest

from poisson_lift.cli import EXIT_PASS, main
from poisson_lift.examples import bundled_examples, load_example
from poisson_lift.groupoid import heisenberg_sign_scan
from poisson_lift.paths import convergence_slope, reconstruction_errors
from poisson_lift.suites import CONVERGENCE_GRID, SuiteConfig, _oracle_vectors, run_suite

BIALGEBRAS = ("su2_standard", "aff1_standard", "trivial_dual_rn", "pair_r4")


@pytest.fixture
def verdict(capsys):
    def emit(number: int, title: str, failures: list[str]):
        ok = not failures
        with capsys.disabled():
            line = f"ACCEPTANCE {number} {'PASS' if ok else 'FAIL'} {title}"
            if failures:
                line += ": " + "; ".join(failures)
            print("\n" + line)
        assert ok, failures
    return emit


def _timed(cfg: SuiteConfig):
    t0 = time.perf_counter()
    rep = run_suite(cfg)
    return rep, time.perf_counter() - t0


def _by_name(rep):
    return {c.name: c for c in rep.checks}


def _require(failures, rep, bounds: dict[str, float], label: str):
    """Every named check is present, computed and below its bound."""
    checks = _by_name(rep)
    for name, bound in bounds.items():
        c = checks.get(name)
        if c is None:
            failures.append(f"{label}: {name} missing")
        elif c.status != "ok" or not c.max_residual <= bound:
            failures.append(f"{label}: {name} = {c.max_residual:.3e} (bound {bound:.0e}, {c.status})")


def test_1_algebra(verdict):
    failures = []
    bounds = dict.fromkeys(["jacobi_primal", "jacobi_dual", "antisymmetry_primal", "antisymmetry_dual", "cocycle",
                            "double_jacobi", "pairing_invariance"], 1e-12)
    for name in BIALGEBRAS:
        load_example(name)  # parse outside the timed region
        rep, wall = _timed(SuiteConfig(name, "algebra", samples=200, seed=42))
        _require(failures, rep, bounds, name)
        if not rep.passed:
            failures.append(f"{name}: algebra suite failed")
        if wall >= 1.0:
            failures.append(f"{name}: runtime {wall:.2f}s")
    verdict(1, "algebra residuals <= 1e-12, runtime < 1 s", failures)


def test_2_dressing(verdict):
    failures = []
    load_example("su2_standard")
    rep, wall = _timed(SuiteConfig("su2_standard", "dressing", samples=200, seed=42))
    _require(failures, rep, {"factorization_roundtrip": 1e-11, "twisted_law_g": 1e-10, "twisted_law_gstar": 1e-10,
                             "infinitesimal_dressing_flow": 1e-4}, "su2")
    checks = _by_name(rep)
    for name in ("twisted_law_g", "twisted_law_gstar"):
        if name in checks and checks[name].n_samples < 200:
            failures.append(f"{name} used {checks[name].n_samples} samples")
    if not rep.passed:
        failures.append("dressing suite failed")
    if wall >= 5.0:
        failures.append(f"runtime {wall:.2f}s")
    verdict(2, "dressing on SU(2)/SB(2,C), runtime < 5 s", failures)


def test_3_poisson_lie(verdict):
    failures = []
    rep = run_suite(SuiteConfig("su2_standard", "poisson", samples=100, seed=42))
    _require(failures, rep, {"multiplicativity": 1e-8, "jacobi": 1e-4, "linearization": 1e-6}, "su2")
    for name in ("multiplicativity", "jacobi", "linearization"):
        c = _by_name(rep).get(name)
        if c is not None and c.n_samples != 100:
            failures.append(f"{name} used {c.n_samples} samples")
    if not rep.passed:
        failures.append("poisson suite failed")
    verdict(3, "coboundary bivector at 100 samples", failures)


def test_4_groupoid(verdict):
    failures = []
    axioms = ["axiom_associativity", "axiom_unit", "axiom_inverse", "axiom_source_target", "axiom_unit_section"]
    for name, tol in (("su2_standard", 1e-9), ("pair_r4", 1e-10), ("trivial_dual_rn", 1e-10)):
        rep = run_suite(SuiteConfig(name, "groupoid", samples=200, seed=42))
        _require(failures, rep, dict.fromkeys(axioms, tol), name)
        if not rep.passed:
            failures.append(f"{name}: groupoid suite failed")
    su2 = run_suite(SuiteConfig("su2_standard", "groupoid", samples=200, seed=42))
    _require(failures, su2, {"source_poisson": 1e-6, "target_anti_poisson": 1e-6, "multiplicativity": 1e-5}, "su2")

    scan = heisenberg_sign_scan(load_example("su2_standard").dm, np.random.default_rng(42), samples=20)
    passing = [s for s in (1, -1) if scan[s]["passed"]]
    if len(passing) != 1:
        failures.append(f"{len(passing)} Heisenberg signs pass")
    else:
        rej = scan[-passing[0]]
        margin = max(rej["source_poisson"], rej["target_anti_poisson"], rej["multiplicativity"])
        if margin < 1e-2 and rej["min_abs_det"] > 1e-8:
            failures.append(f"rejected sign fails only by {margin:.2e}")
    verdict(4, "groupoid axioms and Heisenberg sign selection", failures)


def test_5_lifted(verdict):
    failures = []
    rep = run_suite(SuiteConfig("su2_standard", "lifted", samples=200, seed=42))
    bounds = dict.fromkeys(["action_law", "J_morphism", "equivariance", "twisted_multiplicativity",
                            "induced_unit", "induced_target", "induced_source", "induced_inverse"], 1e-9)
    bounds.update(infinitesimal_twisted=1e-4, hamiltonian=1e-4)
    _require(failures, rep, bounds, "su2")
    ham = _by_name(rep).get("hamiltonian")
    if ham is not None and ham.n_samples != 50:
        failures.append(f"hamiltonian used {ham.n_samples} samples")
    for name in bundled_examples():
        other = run_suite(SuiteConfig(name, "lifted", samples=50, seed=42))
        if not other.passed:
            failures.append(f"{name}: lifted suite failed")
    verdict(5, "lifted action identities", failures)


def test_6_paths(verdict):
    failures = []
    model = load_example("su2_standard").dm.gstar_model
    a, b = _oracle_vectors(model.dim)
    slope = convergence_slope(CONVERGENCE_GRID, reconstruction_errors(model, a, b, CONVERGENCE_GRID))
    if slope < 3.5:
        failures.append(f"convergence slope {slope:.3f}")
    rep, wall = _timed(SuiteConfig("su2_standard", "paths", samples=200, seed=42))
    _require(failures, rep, {"dressing_endpoint": 1e-5, "lifted_endpoint": 1e-5, "momentum_roundtrip": 1e-6},
             "su2")
    if not rep.passed:
        failures.append("paths suite failed")
    if wall >= 30.0:
        failures.append(f"runtime {wall:.1f}s")
    verdict(6, f"paths (slope {slope:.2f}, {wall:.1f}s)", failures)


def test_7_reduction(verdict):
    failures = []
    su2 = run_suite(SuiteConfig("su2_standard", "reduction", samples=200, seed=42))
    _require(failures, su2, {"coisotropy": 1e-12}, "su2")
    homog = [c for c in su2.checks if c.name.startswith("homogeneous_")]
    if not homog:
        failures.append("no homogeneous checks ran")
    failures += [f"su2: {c.name} = {c.max_residual:.3e}" for c in homog if not c.succeeded]
    pair = run_suite(SuiteConfig("pair_r4", "reduction", samples=200, seed=42))
    _require(failures, pair, {"pair_quotient_base_bracket": 1e-6}, "pair")
    _require(failures, pair, {"double_action_rank": 0.0, "double_action_slice_form": 1e-9}, "pair")
    for rep in (su2, pair):
        if not rep.passed:
            failures.append(f"{rep.example}: reduction suite failed")
    verdict(7, "coisotropy, homogeneous, pair and double-action reduction", failures)


def test_8_negative_controls(verdict, tmp_path):
    failures = []
    rep = run_suite(SuiteConfig("su2_standard", "negative-controls", samples=200, seed=42))
    checks = _by_name(rep)
    broken = checks["broken_twist_twisted_multiplicativity"]
    if broken.max_residual < 1e-2:
        failures.append(f"broken twist residual {broken.max_residual:.2e}")
    if checks["wrong_heisenberg_sign"].passed:
        failures.append("wrong Heisenberg sign passed")
    if checks["corrupted_constants_load"].passed:
        failures.append("corrupted constants were accepted")
    code = main(["verify", "negative-controls", "--example", "su2_standard", "--samples", "50",
                 "--out", str(tmp_path / "n.json")])
    if code != EXIT_PASS:
        failures.append(f"harness exit code {code}")
    verdict(8, "negative controls fail and the exit logic inverts them", failures)


def test_9_determinism(verdict, tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    codes = [main(["verify", "all", "--example", "su2_standard", "--seed", "42", "--json", "--out", str(p)])
             for p in paths]
    failures = []
    if paths[0].read_bytes() != paths[1].read_bytes():
        failures.append("reports differ")
    if codes != [EXIT_PASS, EXIT_PASS]:
        failures.append(f"exit codes {codes}")
    verdict(9, "byte-identical reports for verify all --seed 42", failures)
