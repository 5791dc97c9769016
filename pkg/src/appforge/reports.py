"""Shared validation report type.

Used by both manifest validation (violation names are package names) and
app-config validation (violation names are input names). status is "pass"
exactly when the violation list is empty.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Violation:
    name: str
    kind: str
    detail: str

    def to_doc(self) -> dict:
        return {"name": self.name, "kind": self.kind, "detail": self.detail}


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def status(self) -> str:
        return "pass" if not self.violations else "fail"

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_doc(self) -> dict:
        return {"status": self.status, "violations": [v.to_doc() for v in self.violations]}

    @classmethod
    def from_doc(cls, doc: dict) -> "ValidationReport":
        return cls(violations=[Violation(**v) for v in doc.get("violations", [])])
