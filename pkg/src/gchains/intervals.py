from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class ProbInterval:
    """Closed interval ``[lo, hi]`` inside ``[0, 1]`` enclosing a probability."""

    lo: float
    hi: float

    def __post_init__(self):
        lo = min(max(float(self.lo), 0.0), 1.0)
        hi = min(max(float(self.hi), 0.0), 1.0)
        if lo > hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, p: float) -> "ProbInterval":
        return cls(p, p)

    @classmethod
    def around(cls, value: float, radius: float) -> "ProbInterval":
        return cls(value - radius, value + radius)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def is_zero(self) -> bool:
        """Exact nullity; ``[0, 1e-15]`` from truncation is not a zero."""
        return self.hi == 0.0

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, p: float, slack: float = 0.0) -> bool:
        return self.lo - slack <= p <= self.hi + slack

    def __mul__(self, other: "ProbInterval") -> "ProbInterval":
        return ProbInterval(self.lo * other.lo, self.hi * other.hi)

    def __repr__(self) -> str:
        if self.is_point:
            return f"[{self.lo!r}]"
        return f"[{self.lo!r}, {self.hi!r}]"


@dataclass(frozen=True)
class Interval:
    """Unclipped real interval, used for sums and squared differences."""

    lo: float
    hi: float

    @classmethod
    def point(cls, x: float) -> "Interval":
        return cls(x, x)

    def __add__(self, other):
        if isinstance(other, (int, float)):
            return Interval(self.lo + other, self.hi + other)
        return Interval(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __sub__(self, other):
        return Interval(self.lo - other.hi, self.hi - other.lo)

    def square(self) -> "Interval":
        a, b = self.lo * self.lo, self.hi * self.hi
        if self.lo <= 0.0 <= self.hi:
            return Interval(0.0, max(a, b))
        return Interval(min(a, b), max(a, b))

    def abs(self) -> "Interval":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return Interval(-self.hi, -self.lo)
        return Interval(0.0, max(-self.lo, self.hi))

    def scale(self, c: float) -> "Interval":
        a, b = self.lo * c, self.hi * c
        return Interval(min(a, b), max(a, b))

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, x: float, slack: float = 0.0) -> bool:
        return self.lo - slack <= x <= self.hi + slack


def sqrt_interval(p: ProbInterval) -> Interval:
    return Interval(math.sqrt(p.lo), math.sqrt(p.hi))


def as_interval(p: ProbInterval) -> Interval:
    return Interval(p.lo, p.hi)
