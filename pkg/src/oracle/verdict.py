"""
Verdicts: aggregated pass/fail/skip counts of an oracle suite.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional

from pydantic import BaseModel, Field


class Outcome(str, Enum):
    PASSED = "passed"
    FAILED = "failed"
    SKIPPED = "skipped"


@dataclass
class CheckResult:
    """Outcome of one oracle check on one instance."""
    outcome: Outcome
    message: str = ""
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.outcome is Outcome.PASSED


class Verdict(BaseModel):
    suite: str
    instances: int = 0
    passed: int = 0
    skipped: int = 0
    first_failure: Optional[Dict[str, Any]] = None
    details: Dict[str, Any] = Field(default_factory=dict)

    @property
    def failed(self) -> int:
        return self.instances - self.passed - self.skipped

    @property
    def ok(self) -> bool:
        return self.failed == 0 and self.first_failure is None

    def record(self, result: CheckResult, instance: Optional[Dict[str, Any]] = None) -> None:
        self.instances += 1
        if result.outcome is Outcome.PASSED:
            self.passed += 1
        elif result.outcome is Outcome.SKIPPED:
            self.skipped += 1
        elif self.first_failure is None:
            self.first_failure = {
                "instance": instance or {},
                "message": result.message,
                "details": result.details,
            }

    def fail(self, message: str, details: Optional[Dict[str, Any]] = None) -> None:
        """Record a suite-level failure that is not tied to a single instance."""
        if self.first_failure is None:
            self.first_failure = {"instance": {}, "message": message, "details": details or {}}

    def to_json(self) -> str:
        return self.model_dump_json(indent=2)
