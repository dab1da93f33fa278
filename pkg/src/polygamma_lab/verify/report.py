"""VerificationReport and its JSON / CSV / text renderings."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone

from .outcome import CheckOutcome, ConjectureScan

NORMALIZED_TIMESTAMP = "1970-01-01T00:00:00+00:00"


def now_iso() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class VerificationReport:
    outcomes: list[CheckOutcome]
    config_echo: dict
    timestamp: str = field(default_factory=now_iso)
    scans: list[ConjectureScan] = field(default_factory=list)

    def __post_init__(self):
        ids = [o.claim_id for o in self.outcomes]
        if len(ids) != len(set(ids)):
            dup = sorted({i for i in ids if ids.count(i) > 1})
            raise ValueError(f"duplicate claim ids in report: {dup}")

    @property
    def gating(self) -> list[CheckOutcome]:
        return [o for o in self.outcomes if not o.exploratory]

    @property
    def all_passed(self) -> bool:
        return all(o.passed for o in self.gating)

    def failures(self) -> list[CheckOutcome]:
        return [o for o in self.gating if not o.passed]

    def outcome(self, claim_id: str) -> CheckOutcome:
        for o in self.outcomes:
            if o.claim_id == claim_id:
                return o
        raise KeyError(claim_id)

    def to_dict(self, normalize_timestamp: bool = False) -> dict:
        gating = self.gating
        return {
            "timestamp": NORMALIZED_TIMESTAMP if normalize_timestamp else self.timestamp,
            "config": self.config_echo,
            "summary": {
                "checks": len(gating),
                "passed": sum(o.passed for o in gating),
                "failed": sum(not o.passed for o in gating),
                "exploratory": len(self.outcomes) - len(gating),
                "all_passed": self.all_passed,
            },
            "outcomes": [o.to_dict() for o in self.outcomes],
            "scans": [s.to_dict() for s in self.scans],
        }

    def to_json(self, normalize_timestamp: bool = False) -> str:
        return json.dumps(self.to_dict(normalize_timestamp), indent=2, sort_keys=True) + "\n"

    def outcomes_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["claim_id", "passed", "margin", "witness_x", "samples", "exploratory"])
        for o in self.outcomes:
            w.writerow([o.claim_id, o.passed, repr(o.margin), repr(o.witness_x),
                        o.samples, o.exploratory])
        return buf.getvalue()

    def to_text(self) -> str:
        lines = []
        for o in self.outcomes:
            tag = "EXPL" if o.exploratory else ("PASS" if o.passed else "FAIL")
            lines.append(
                f"{tag} {o.claim_id} margin={o.margin:.6g} "
                f"witness_x={o.witness_x!r} samples={o.samples}"
            )
        for s in self.scans:
            lines.append(f"SCAN {s.claim_id} {s.classification} witness={s.witness}")
        g = self.gating
        lines.append(f"{sum(o.passed for o in g)}/{len(g)} checks passed")
        return "\n".join(lines) + "\n"


def scans_csv(scans: list[ConjectureScan]) -> str:
    """One row per sample: claim_id, x, value, d1, d2 (blank where undefined)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["claim_id", "x", "value", "d1", "d2"])
    for s in scans:
        for x, v, d1, d2 in s.sample_points:
            w.writerow([s.claim_id, repr(x), repr(v),
                        "" if d1 is None else repr(d1), "" if d2 is None else repr(d2)])
    return buf.getvalue()


def scans_json(scans: list[ConjectureScan]) -> str:
    return json.dumps([s.to_dict() for s in scans], indent=2, sort_keys=True) + "\n"
