"""Verification report records shared by the engine and the CLI."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


def _plain(x: Any) -> Any:
    """Convert tuples and numpy scalars so the value is JSON-ready."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if hasattr(x, "tolist"):
        return x.tolist()
    return x


@dataclass
class Report:
    claim: str
    anchor: str
    parameters: dict
    expected: Any
    computed: Any
    passed: bool
    details: dict = field(default_factory=dict)
    timing: float | None = None

    def to_json(self, with_timing: bool = False) -> dict:
        out = {
            "claim": self.claim,
            "anchor": self.anchor,
            "parameters": _plain(self.parameters),
            "expected": _plain(self.expected),
            "computed": _plain(self.computed),
            "pass": bool(self.passed),
        }
        if self.details:
            out["details"] = _plain(self.details)
        if with_timing and self.timing is not None:
            out["timing"] = round(self.timing, 6)
        return out

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.claim}: expected {self.expected}, computed {self.computed}"
