"""Structured results for property suites, serializable to stable JSON."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

SCHEMA_VERSION = 1

PASSED = "passed"
FAILED = "failed"
SKIPPED = "skipped"


@dataclass(frozen=True)
class PropertyCheck:
    """Outcome of one named check across a batch of random trials."""

    name: str
    status: str
    trials: int = 0
    failures: int = 0
    tolerance: float = 0.0
    max_violation: float = 0.0
    first_counterexample: dict | None = None
    reason: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "trials": self.trials,
            "failures": self.failures,
            "tolerance": self.tolerance,
            "max_violation": self.max_violation,
            "first_counterexample": self.first_counterexample,
            "reason": self.reason,
        }


@dataclass(frozen=True)
class PropertyReport:
    """All checks of one suite run against one capacity."""

    suite: str
    capacity: str
    seed: int
    trials: int
    checks: tuple[PropertyCheck, ...] = field(default_factory=tuple)

    @property
    def failures(self) -> int:
        return sum(c.failures for c in self.checks)

    @property
    def all_passed(self) -> bool:
        return all(c.status != FAILED for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "suite": self.suite,
            "capacity": self.capacity,
            "seed": self.seed,
            "trials": self.trials,
            "failures": self.failures,
            "all_passed": self.all_passed,
            "checks": [c.to_dict() for c in self.checks],
        }

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(self.to_dict(), indent=indent)


class CheckAccumulator:
    """Collects per-trial outcomes for one check."""

    def __init__(self, name: str, tolerance: float):
        self.name = name
        self.tolerance = tolerance
        self.trials = 0
        self.failures = 0
        self.max_violation = 0.0
        self.first_counterexample: dict | None = None

    def record(self, violation: float, payload: dict) -> None:
        self.trials += 1
        if violation > self.max_violation:
            self.max_violation = violation
        if violation > self.tolerance:
            self.failures += 1
            if self.first_counterexample is None:
                self.first_counterexample = payload

    def finish(self) -> PropertyCheck:
        status = FAILED if self.failures else PASSED
        return PropertyCheck(
            name=self.name,
            status=status,
            trials=self.trials,
            failures=self.failures,
            tolerance=self.tolerance,
            max_violation=self.max_violation,
            first_counterexample=self.first_counterexample,
        )


def skipped_check(name: str, reason: str) -> PropertyCheck:
    return PropertyCheck(name=name, status=SKIPPED, reason=reason)
