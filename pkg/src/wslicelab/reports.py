"""Structured verdicts shared by the metric and slice checks."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

PASS, FAIL, APPROX_PASS, APPROX_FAIL, INFO = "pass", "fail", "approx-pass", "approx-fail", "info"


@dataclass
class ConditionResult:
    condition: str
    verdict: str
    measured: dict = field(default_factory=dict)
    mandatory: bool = True
    target: str | None = None

    @property
    def passed(self) -> bool:
        return self.verdict in (PASS, APPROX_PASS, INFO)

    def to_dict(self) -> dict:
        return {"condition": self.condition, "verdict": self.verdict, "mandatory": self.mandatory,
                "target": self.target, "measured": self.measured}


@dataclass
class CheckReport:
    title: str
    entries: list = field(default_factory=list)
    context: dict = field(default_factory=dict)

    def add(self, condition: str, ok: bool | None, measured: dict | None = None,
            mandatory: bool = True, target: str | None = None, approx: bool = False) -> ConditionResult:
        if ok is None:
            verdict = INFO
        elif approx:
            verdict = APPROX_PASS if ok else APPROX_FAIL
        else:
            verdict = PASS if ok else FAIL
        res = ConditionResult(condition, verdict, measured or {}, mandatory, target)
        self.entries.append(res)
        return res

    def verdicts(self) -> list[tuple[str, str | None, str]]:
        return [(e.condition, e.target, e.verdict) for e in self.entries]

    def extend(self, other: "CheckReport") -> None:
        self.entries.extend(other.entries)

    @property
    def overall(self) -> str:
        ok = all(e.passed for e in self.entries if e.mandatory)
        return PASS if ok else FAIL

    @property
    def passed(self) -> bool:
        return self.overall == PASS

    def select(self, condition: str) -> list[ConditionResult]:
        return [e for e in self.entries if e.condition == condition]

    def all_pass(self, condition: str) -> bool:
        return all(e.passed for e in self.select(condition))

    def to_dict(self) -> dict[str, Any]:
        return {"title": self.title, "overall": self.overall, "context": self.context,
                "entries": [e.to_dict() for e in self.entries]}
