"""Lifted Poisson actions on symplectic groupoids, checked numerically.

Matrix Lie groups, Lie bialgebras and their doubles, Poisson-Lie
bivectors, three groupoid models with lifted actions and momentum maps,
discretized cotangent paths and reduction scenarios, all exposed as
residual checks that can be run from :mod:`poisson_lift.suites` or the
``poisson-lift`` command.
"""
from .examples import Example, ExampleError, load_example
from .report import CheckReport, SuiteReport
from .suites import SuiteConfig, run_suite

__all__ = ["CheckReport", "Example", "ExampleError", "SuiteConfig", "SuiteReport", "load_example", "run_suite"]
__version__ = "0.1.0"
