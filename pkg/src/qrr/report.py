"""Structured outcomes for verification runs."""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of one check: pass/fail plus a witness for failures."""

    ident: str
    kind: str
    params: dict = field(default_factory=dict)
    status: str = "pass"            # pass | fail | skipped
    witness: dict | None = None

    def __post_init__(self):
        if self.status not in ("pass", "fail", "skipped"):
            raise ValueError(f"bad status {self.status!r}")
        if self.status == "fail" and not self.witness:
            raise ValueError("fail reports must carry a witness")

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_json(self) -> str:
        d = {"id": self.ident, "check": self.kind, "params": self.params,
             "status": self.status}
        if self.witness is not None:
            d["witness"] = self.witness
        return json.dumps(d, sort_keys=True, default=str)

    def to_text(self) -> str:
        p = " ".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        line = f"{self.status.upper():4}  {self.ident:<16} {self.kind:<10} {p}"
        if self.witness:
            line += "  witness: " + json.dumps(self.witness, sort_keys=True, default=str)
        return line


def ok(ident: str, kind: str, **params) -> VerificationReport:
    return VerificationReport(ident, kind, params)


def fail(ident: str, kind: str, witness: dict, **params) -> VerificationReport:
    return VerificationReport(ident, kind, params, "fail", witness)


def skipped(ident: str, kind: str, reason: str, **params) -> VerificationReport:
    return VerificationReport(ident, kind, params, "skipped", {"reason": reason})
