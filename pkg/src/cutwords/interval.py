"""Closed intervals used to propagate two-sided entropy brackets.

Endpoint arithmetic only; every coefficient applied to an interval in this
package is non-negative, so [lo, hi] maps to [c*lo + d, c*hi + d].
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not (self.lo <= self.hi + 1e-10):
            raise ValueError(f"interval endpoints out of order: [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x: float, slack: float = 0.0) -> bool:
        return self.lo - slack <= x <= self.hi + slack

    def shift(self, c: float) -> "Interval":
        return Interval(self.lo + c, self.hi + c)

    def scale(self, c: float) -> "Interval":
        if c < 0:
            raise ValueError("only non-negative scaling is supported")
        return Interval(c * self.lo, c * self.hi)

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.lo) or math.isinf(self.hi)


INF_INTERVAL = Interval(math.inf, math.inf)


def point(x: float) -> Interval:
    return Interval(x, x)
