"""Result records produced by checks and scans."""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class CheckOutcome:
    """Verdict for one claim.

    ``margin`` is the raw signed slack at ``witness_x``, the point where
    the slack relative to the local value scale is smallest.  For a failed
    check the witness is the offending point.
    """

    claim_id: str
    passed: bool
    witness_x: float | None
    margin: float
    samples: int
    exploratory: bool = False
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {
            "claim_id": self.claim_id,
            "passed": self.passed,
            "margin": _json_float(self.margin),
            "witness_x": _json_float(self.witness_x),
            "samples": self.samples,
        }
        if self.exploratory:
            d["exploratory"] = True
        if self.detail:
            d["detail"] = {k: _json_float(v) for k, v in self.detail.items()}
        return d


@dataclass
class ConjectureScan:
    claim_id: str
    sample_points: list  # (x, value, first_diff, second_diff)
    classification: str  # consistent | violated | inconclusive
    witness: tuple | None = None
    detail: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.classification not in ("consistent", "violated", "inconclusive"):
            raise ValueError(f"bad classification {self.classification!r}")
        if self.classification == "violated" and self.witness is None:
            raise ValueError("a violated scan needs a witness")

    def to_dict(self) -> dict:
        d = {
            "claim_id": self.claim_id,
            "classification": self.classification,
            "witness": None
            if self.witness is None
            else [_json_float(v) for v in self.witness],
            "samples": len(self.sample_points),
        }
        if self.detail:
            d["detail"] = {k: _json_float(v) for k, v in self.detail.items()}
        return d


def _json_float(v):
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v
