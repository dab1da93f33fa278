"""Sampling grids for the property checks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Grid:
    """``count`` points on [lo, hi].

    Logarithmic grids are spaced geometrically in the distance from
    ``offset``, so ``Grid(-1 + 1e-6, 100, 500, "logarithmic", offset=-1)``
    crowds points against -1.
    """

    lo: float
    hi: float
    count: int
    spacing: str = "linear"
    offset: float = 0.0

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"grid needs lo < hi, got [{self.lo}, {self.hi}]")
        if self.count < 2:
            raise ValueError("grid needs at least two points")
        if self.spacing not in ("linear", "logarithmic"):
            raise ValueError(f"unknown spacing {self.spacing!r}")
        if self.spacing == "logarithmic" and not self.lo > self.offset:
            raise ValueError("logarithmic grid needs lo > offset")

    @classmethod
    def log(cls, lo, hi, count, offset=0.0):
        return cls(float(lo), float(hi), int(count), "logarithmic", float(offset))

    @classmethod
    def linear(cls, lo, hi, count):
        return cls(float(lo), float(hi), int(count), "linear")

    def points(self) -> np.ndarray:
        if self.spacing == "linear":
            return np.linspace(self.lo, self.hi, self.count)
        d = np.geomspace(self.lo - self.offset, self.hi - self.offset, self.count)
        pts = self.offset + d
        # pin the endpoints against offset round-off
        pts[0], pts[-1] = self.lo, self.hi
        return pts

    def excluding(self, center: float, radius: float) -> np.ndarray:
        pts = self.points()
        return pts[np.abs(pts - center) > radius]

    def to_dict(self) -> dict:
        return {
            "lo": self.lo,
            "hi": self.hi,
            "count": self.count,
            "spacing": self.spacing,
            "offset": self.offset,
        }

    @classmethod
    def from_dict(cls, d: dict) -> Grid:
        return cls(
            float(d["lo"]),
            float(d["hi"]),
            int(d["count"]),
            d.get("spacing", "linear"),
            float(d.get("offset", 0.0)),
        )
