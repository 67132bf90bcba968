"""Pass/fail results carrying a concrete witness on failure."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, Optional


@dataclass(frozen=True)
class Verdict:
    """Outcome of a finite check.

    witness is present exactly when the check fails; it is a dict of
    named parts (subset masks, permutations, candidate lists) that can
    be replayed through the public evaluation functions to reproduce
    the failure.  note carries extra context such as "vacuous".
    """

    holds: bool
    witness: Optional[Dict[str, Any]] = None
    note: str = ""

    def __post_init__(self):
        if self.holds and self.witness is not None:
            raise ValueError("passing verdict must not carry a witness")
        if not self.holds and self.witness is None:
            raise ValueError("failing verdict must carry a witness")

    def __bool__(self) -> bool:
        return self.holds

    def to_obj(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"holds": self.holds}
        if self.witness is not None:
            out["witness"] = _jsonable(self.witness)
        if self.note:
            out["note"] = self.note
        return out


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value
