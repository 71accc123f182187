"""Named residual checks with tolerances and pass/fail verdicts."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field


@dataclass
class CheckEntry:
    name: str
    residual: float
    tolerance: float
    passed: bool
    context: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "residual": _jsonable(self.residual),
            "tolerance": _jsonable(self.tolerance),
            "pass": self.passed,
            "context": {k: _jsonable(v) for k, v in sorted(self.context.items())},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CheckEntry":
        return cls(d["name"], _unjson(d["residual"]), _unjson(d["tolerance"]),
                   bool(d["pass"]), {k: _unjson(v) for k, v in d["context"].items()})


def _jsonable(v):
    # JSON has no inf/nan; keep them as tagged strings so round-trips are lossless.
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    if hasattr(v, "item"):  # numpy scalar
        return _jsonable(v.item())
    return v


def _unjson(v):
    if v in ("inf", "-inf", "nan"):
        return float(v)
    return v


class CheckReport:
    """Ordered collection of :class:`CheckEntry` records."""

    def __init__(self, entries=None):
        self.entries: list[CheckEntry] = list(entries or [])

    def add(self, name: str, residual: float, tolerance: float, *,
            passed: bool | None = None, **context) -> CheckEntry:
        """Record a residual; passes when ``residual <= tolerance`` unless
        ``passed`` is given explicitly (used for lower-bound checks)."""
        residual = float(residual)
        if passed is None:
            passed = bool(residual <= tolerance)
        entry = CheckEntry(name, residual, float(tolerance), bool(passed), dict(context))
        self.entries.append(entry)
        return entry

    def add_flag(self, name: str, ok: bool, **context) -> CheckEntry:
        """Record a boolean check (residual 0 on success, 1 on failure)."""
        return self.add(name, 0.0 if ok else 1.0, 0.0, passed=ok, **context)

    def extend(self, other: "CheckReport", prefix: str = "") -> "CheckReport":
        for e in other.entries:
            self.entries.append(CheckEntry(prefix + e.name, e.residual, e.tolerance,
                                           e.passed, dict(e.context)))
        return self

    @property
    def overall_pass(self) -> bool:
        return all(e.passed for e in self.entries)

    def __getitem__(self, name: str) -> CheckEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def __contains__(self, name: str) -> bool:
        return any(e.name == name for e in self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def failures(self) -> list[CheckEntry]:
        return [e for e in self.entries if not e.passed]

    def to_dict(self) -> dict:
        return {"entries": [e.to_dict() for e in self.entries],
                "overall_pass": self.overall_pass}

    @classmethod
    def from_dict(cls, d: dict) -> "CheckReport":
        rep = cls(CheckEntry.from_dict(e) for e in d["entries"])
        if rep.overall_pass != d["overall_pass"]:
            raise ValueError("overall_pass inconsistent with entries")
        return rep

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "CheckReport":
        return cls.from_dict(json.loads(text))

    def summary(self) -> str:
        lines = []
        for e in self.entries:
            flag = "PASS" if e.passed else "FAIL"
            lines.append(f"[{flag}] {e.name}: residual={e.residual:.3e} tol={e.tolerance:.1e}")
        return "\n".join(lines)
