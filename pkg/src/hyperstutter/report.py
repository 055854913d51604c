"""Verification records and the versioned JSON report."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

SCHEMA = 1


@dataclass
class Case:
    family: str
    inputs: dict
    expected: Any
    actual: Any

    @property
    def agree(self) -> bool:
        return self.expected == self.actual

    def as_dict(self) -> dict:
        return {
            "family": self.family,
            "inputs": self.inputs,
            "expected": _plain(self.expected),
            "actual": _plain(self.actual),
            "agree": self.agree,
        }


def _plain(v):
    if isinstance(v, (set, frozenset)):
        return sorted(v)
    return v


@dataclass
class Report:
    command: list = field(default_factory=list)
    cases: list = field(default_factory=list)
    caveats: list = field(default_factory=list)
    results: dict = field(default_factory=dict)
    wall_clock: float = 0.0

    def add(self, family: str, inputs: dict, expected, actual) -> Case:
        c = Case(family, inputs, expected, actual)
        self.cases.append(c)
        return c

    def extend(self, other: "Report") -> None:
        self.cases.extend(other.cases)
        self.caveats.extend(c for c in other.caveats if c not in self.caveats)
        self.results.update(other.results)

    @property
    def ok(self) -> bool:
        return all(c.agree for c in self.cases)

    def summary(self) -> dict:
        per: dict = {}
        for c in self.cases:
            row = per.setdefault(c.family, {"total": 0, "agree": 0})
            row["total"] += 1
            row["agree"] += c.agree
        agree = sum(c.agree for c in self.cases)
        return {
            "total": len(self.cases),
            "agree": agree,
            "disagree": len(self.cases) - agree,
            "families": per,
        }

    def as_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "command": list(self.command),
            "results": self.results,
            "cases": [c.as_dict() for c in self.cases],
            "summary": self.summary(),
            "caveats": list(self.caveats),
            "wall_clock_seconds": self.wall_clock,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True) + "\n"

    def text(self, with_results: bool = True) -> str:
        lines = []
        s = self.summary()
        for fam, row in s["families"].items():
            lines.append(f"{fam}: {row['agree']}/{row['total']} agree")
        for c in self.cases:
            if not c.agree:
                lines.append(f"  mismatch {c.family} {c.inputs}: expected {_plain(c.expected)}, got {_plain(c.actual)}")
        for k, v in (self.results.items() if with_results else ()):
            lines.append(f"{k}: {v}")
        for cav in self.caveats:
            lines.append(f"note: {cav}")
        return "\n".join(lines)
