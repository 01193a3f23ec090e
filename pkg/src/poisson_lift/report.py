"""Residual reports shared by every verification routine."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Iterable

import numpy as np

SCHEMA_VERSION = 1


@dataclass
class CheckReport:
    """Outcome of one named residual check over a batch of samples.

    ``passed`` is always ``max_residual <= tolerance``. A check marked
    ``expect_fail`` is a negative control: the harness counts it as
    successful when it does *not* pass.
    """

    name: str
    max_residual: float
    tolerance: float
    n_samples: int = 1
    mean_residual: float = 0.0
    suite: str = ""
    example: str = ""
    seed: int | None = None
    passed: bool = False
    expect_fail: bool = False
    status: str = "ok"
    note: str = ""
    sign_choices_recorded: dict = field(default_factory=dict)
    wall_time: float | None = None

    def __post_init__(self):
        self.max_residual = float(self.max_residual)
        self.mean_residual = float(self.mean_residual)
        self.tolerance = float(self.tolerance)
        if self.status == "ok":
            self.passed = bool(self.max_residual <= self.tolerance)
        else:
            self.passed = False

    @classmethod
    def from_residuals(cls, name: str, residuals: Iterable[float], tolerance: float, **kw) -> "CheckReport":
        r = np.asarray(list(residuals), dtype=float)
        if r.size == 0:
            raise ValueError(f"check {name!r} received no residuals")
        # a NaN residual must never count as a pass
        r = np.where(np.isfinite(r), r, np.inf)
        return cls(name=name, max_residual=float(r.max()), mean_residual=float(r.mean()),
                   n_samples=int(r.size), tolerance=tolerance, **kw)

    @classmethod
    def not_computed(cls, name: str, note: str, **kw) -> "CheckReport":
        return cls(name=name, max_residual=float("nan"), tolerance=0.0, n_samples=0,
                   status="not-computed", note=note, **kw)

    @property
    def succeeded(self) -> bool:
        """Whether the check did what the harness wants it to do."""
        if self.status == "not-computed":
            return True
        if self.status == "error":
            return False
        return self.passed != self.expect_fail

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("max_residual", "mean_residual"):
            if not np.isfinite(d[key]):
                d[key] = repr(d[key])
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CheckReport":
        d = dict(d)
        for key in ("max_residual", "mean_residual"):
            if isinstance(d[key], str):
                d[key] = float(d[key])
        passed = d.pop("passed")
        rep = cls(**d)
        rep.passed = passed
        return rep


@dataclass
class SuiteReport:
    suite: str
    example: str
    seed: int
    samples: int
    checks: list[CheckReport] = field(default_factory=list)
    error: str | None = None
    wall_time: float | None = None

    @property
    def passed(self) -> bool:
        return self.error is None and all(c.succeeded for c in self.checks)

    def to_dict(self) -> dict:
        d = {
            "schema_version": SCHEMA_VERSION,
            "suite": self.suite,
            "example": self.example,
            "seed": self.seed,
            "samples": self.samples,
            "passed": self.passed,
            "error": self.error,
            "checks": [c.to_dict() for c in self.checks],
        }
        if self.wall_time is not None:
            d["wall_time"] = self.wall_time
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "SuiteReport":
        return cls(suite=d["suite"], example=d["example"], seed=d["seed"], samples=d["samples"],
                   checks=[CheckReport.from_dict(c) for c in d["checks"]], error=d.get("error"),
                   wall_time=d.get("wall_time"))

    def to_markdown(self) -> str:
        head = f"## {self.suite} on `{self.example}` (seed {self.seed}): {'PASS' if self.passed else 'FAIL'}\n\n"
        if self.error:
            head += f"**error:** {self.error}\n\n"
        rows = ["| check | samples | max residual | tolerance | result |", "|---|---|---|---|---|"]
        for c in self.checks:
            if c.status != "ok":
                verdict = c.status
            elif c.expect_fail:
                verdict = "control ok (fails)" if not c.passed else "CONTROL DID NOT FAIL"
            else:
                verdict = "pass" if c.passed else "FAIL"
            rows.append(f"| {c.name} | {c.n_samples} | {c.max_residual:.3e} | {c.tolerance:.1e} | {verdict} |")
        return head + "\n".join(rows) + "\n"
