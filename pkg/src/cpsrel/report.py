"""Check reports: a stable machine record plus a short human summary."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Optional

from .relcat import Relation, sort_key


def encode(x: Any) -> Any:
    """JSON-friendly form with a deterministic order for sets and relations."""
    if isinstance(x, Relation):
        return [[encode(a), encode(b)] for a, b in sorted(x.pairs(), key=sort_key)]
    if isinstance(x, (set, frozenset)):
        return [encode(e) for e in sorted(x, key=sort_key)]
    if isinstance(x, (list, tuple)):
        return [encode(e) for e in x]
    if isinstance(x, dict):
        return {str(k): encode(v) for k, v in x.items()}
    if isinstance(x, (str, int, float, bool)) or x is None:
        return x
    return str(x)


@dataclass
class CheckReport:
    check: str
    inputs: dict
    verdict: Any
    expected: Any = None
    witness: Any = None
    candidates_examined: Optional[int] = None
    details: dict = field(default_factory=dict)
    elapsed: float = 0.0
    exit_code: int = 0

    def record(self) -> dict:
        return {
            "check": self.check,
            "inputs": encode(self.inputs),
            "verdict": encode(self.verdict),
            "expected": encode(self.expected),
            "witness": encode(self.witness),
            "candidates_examined": self.candidates_examined,
            "details": encode(self.details),
            "exit_code": self.exit_code,
            "elapsed": round(self.elapsed, 6),
        }

    def to_json(self) -> str:
        return json.dumps(self.record(), indent=2, ensure_ascii=False) + "\n"

    def summary(self) -> str:
        lines = [f"{self.check}: {_show(self.verdict)}"]
        for k, v in self.inputs.items():
            lines.append(f"  {k}: {_show(v)}")
        for k, v in self.details.items():
            lines.append(f"  {k}: {_show(v)}")
        if self.witness is not None:
            lines.append(f"  witness: {_show(self.witness)}")
        if self.candidates_examined is not None:
            lines.append(f"  candidates examined: {self.candidates_examined}")
        if self.expected is not None:
            ok = "matches" if self.exit_code == 0 else "DOES NOT match"
            lines.append(f"  expected {_show(self.expected)}: {ok}")
        lines.append(f"  elapsed: {self.elapsed:.3f}s")
        return "\n".join(lines)


def _show(x: Any) -> str:
    x = encode(x)
    if isinstance(x, str):
        return x
    if isinstance(x, bool) or x is None:
        return str(x).lower() if isinstance(x, bool) else "none"
    return json.dumps(x, ensure_ascii=False)


def strip_elapsed(record: dict) -> dict:
    """The record minus timing, for byte-level comparisons."""
    return {k: v for k, v in record.items() if k != "elapsed"}
