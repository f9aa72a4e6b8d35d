"""Absolutely summable coefficient sequences with certified tail sums."""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import zeta

from ..errors import SpecError


class Coefficients:
    """Sequence ``c_i`` for ``i >= start`` with ``tail(k) >= sum_{i > k} |c_i|``."""

    start: int = 0

    def __call__(self, i: int) -> float:
        raise NotImplementedError

    def tail(self, k: int) -> float:
        raise NotImplementedError

    def total(self) -> float:
        return self.tail(self.start - 1)

    def abs_total(self) -> float:
        return self.tail(self.start - 1)

    def cutoff(self, eps: float) -> int:
        """Smallest ``L >= start - 1`` with ``tail(L) <= eps``."""
        lo = self.start - 1
        if self.tail(lo) <= eps:
            return lo
        hi = max(lo + 1, 1)
        while self.tail(hi) > eps:
            hi *= 2
            if hi > 1 << 40:
                raise SpecError("coefficient tail does not fall below tolerance")
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.tail(mid) <= eps:
                hi = mid
            else:
                lo = mid
        return hi

    def spec(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Geometric(Coefficients):
    """``c_i = scale * ratio**i``."""

    scale: float
    ratio: float
    start: int = 0

    def __post_init__(self):
        if not (0.0 <= self.ratio < 1.0):
            raise SpecError("geometric ratio must lie in [0, 1)")

    def __call__(self, i: int) -> float:
        return self.scale * self.ratio**i if i >= self.start else 0.0

    def tail(self, k: int) -> float:
        k = max(k, self.start - 1)
        return abs(self.scale) * self.ratio ** (k + 1) / (1.0 - self.ratio)

    def total(self) -> float:
        return self.scale * self.ratio**self.start / (1.0 - self.ratio)

    def spec(self) -> dict:
        return {"kind": "geometric", "params": {"scale": repr(self.scale), "ratio": repr(self.ratio)}}


@dataclass(frozen=True)
class PowerLaw(Coefficients):
    """``c_i = scale * i**(-exponent)`` (``i >= start >= 1``)."""

    scale: float
    exponent: float
    start: int = 1

    def __post_init__(self):
        if self.exponent <= 1.0:
            raise SpecError("power-law exponent must exceed 1 for summability")
        if self.start < 1:
            raise SpecError("power-law sequences start at index >= 1")

    def __call__(self, i: int) -> float:
        return self.scale * float(i) ** (-self.exponent) if i >= self.start else 0.0

    def tail(self, k: int) -> float:
        k = max(k, self.start - 1)
        return abs(self.scale) * float(zeta(self.exponent, k + 1))

    def total(self) -> float:
        return self.scale * float(zeta(self.exponent, self.start))

    def spec(self) -> dict:
        return {"kind": "powerlaw", "params": {"scale": repr(self.scale), "exponent": repr(self.exponent)}}


@dataclass(frozen=True)
class Explicit(Coefficients):
    """Finitely many nonzero values ``values[j] = c_{start + j}``."""

    values: tuple
    start: int = 0

    def __call__(self, i: int) -> float:
        j = i - self.start
        return self.values[j] if 0 <= j < len(self.values) else 0.0

    def tail(self, k: int) -> float:
        j = max(k + 1 - self.start, 0)
        return math.fsum(abs(v) for v in self.values[j:])

    def total(self) -> float:
        return math.fsum(self.values)

    def spec(self) -> dict:
        return {"kind": "explicit", "params": {"values": [repr(v) for v in self.values]}}


def coefficients_from_spec(doc: dict, start: int) -> Coefficients:
    from .specs import real

    kind = doc.get("kind")
    params = doc.get("params", {})
    if kind == "geometric":
        return Geometric(real(params["scale"]), real(params["ratio"]), start=start)
    if kind == "powerlaw":
        return PowerLaw(real(params["scale"]), real(params["exponent"]), start=max(start, 1))
    if kind == "explicit":
        return Explicit(tuple(real(v) for v in params["values"]), start=start)
    raise SpecError(f"unknown coefficient kind {kind!r}")
