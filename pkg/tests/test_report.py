import json
import math

from hypothesis import given, strategies as st

from poisson_lift.report import CheckReport, SuiteReport

residual = st.one_of(st.floats(0, 1e6), st.just(math.inf), st.just(math.nan))


@given(st.lists(residual, min_size=1, max_size=20), st.floats(1e-14, 1.0), st.booleans())
def test_report_json_roundtrip(res, tol, expect_fail):
    rep = CheckReport.from_residuals("c", res, tol, suite="s", example="e", seed=3, expect_fail=expect_fail)
    suite = SuiteReport("s", "e", 3, len(res), [rep])
    back = SuiteReport.from_dict(json.loads(suite.to_json()))
    assert back.to_json() == suite.to_json()
    assert back.passed == suite.passed


def test_nan_never_passes():
    rep = CheckReport.from_residuals("c", [0.0, math.nan], 1.0)
    assert math.isinf(rep.max_residual) and not rep.passed


def test_passed_is_residual_within_tolerance():
    assert CheckReport("c", 1e-9, 1e-9).passed
    assert not CheckReport("c", 2e-9, 1e-9).passed


def test_negative_control_logic():
    failing_control = CheckReport("c", 1.0, 1e-2, expect_fail=True)
    passing_control = CheckReport("c", 1e-5, 1e-2, expect_fail=True)
    assert failing_control.succeeded and not passing_control.succeeded
    suite = SuiteReport("s", "e", 0, 1, [failing_control])
    assert suite.passed
    assert "control ok (fails)" in suite.to_markdown()
    assert "CONTROL DID NOT FAIL" in SuiteReport("s", "e", 0, 1, [passing_control]).to_markdown()


def test_error_and_not_computed_status():
    err = CheckReport("c", math.inf, 1.0, status="error")
    nc = CheckReport.not_computed("k", "documented only")
    assert not err.passed and not err.succeeded
    assert nc.succeeded and nc.n_samples == 0
    assert not SuiteReport("s", "e", 0, 1, [nc, err]).passed
    assert SuiteReport("s", "e", 0, 1, [nc]).passed
    assert not SuiteReport("s", "e", 0, 1, [], error="load failed").passed


def test_empty_residuals_rejected():
    import pytest
    with pytest.raises(ValueError):
        CheckReport.from_residuals("c", [], 1.0)
