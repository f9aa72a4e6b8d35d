"""Renewal kernels and the existence/uniqueness classifier.

The probability of emitting a 1 depends only on the number ``l`` of zeros
since the last 1: ``g(x 1) = q_l`` with ``q_inf`` used for the all-zero
past.  ``q`` is given as a rule (closed form in ``i``) so the value at
infinity is exact and series verdicts can carry certificates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import BadQ, NoAnalyticBound
from ..intervals import ProbInterval
from ..kernel import Alphabet, Kernel
from ..words import PastSpec
from ..zeros import ZeroDeclaration


class QRule:
    """Sequence ``q_i`` for finite ``i >= 0`` plus the value ``q_inf``."""

    q_inf: float

    def __call__(self, i: int) -> float:
        raise NotImplementedError

    def values(self, n: int) -> np.ndarray:
        return np.array([self(i) for i in range(n)], dtype=float)

    @property
    def limit(self) -> float:
        """``lim q_i`` along finite ``i`` (may differ from ``q_inf``)."""
        raise NotImplementedError

    def series_certificate(self) -> tuple[str, str] | None:
        """``("convergent" | "divergent", reason)`` for ``sum_n prod_{i<=n} (1 - q_i)``."""
        return None

    def range_from(self, k: int) -> tuple[float, float]:
        """Bounds on ``{q_i : i >= k}`` (finite ``i`` only)."""
        raise NoAnalyticBound("rule has no range certificate")

    def spec(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class ConstantQ(QRule):
    c: float
    q_inf: float = None

    def __post_init__(self):
        if self.q_inf is None:
            object.__setattr__(self, "q_inf", self.c)

    def __call__(self, i: int) -> float:
        return self.c

    def values(self, n: int) -> np.ndarray:
        return np.full(n, self.c)

    @property
    def limit(self) -> float:
        return self.c

    def series_certificate(self):
        return "convergent", f"geometric: prod = (1 - {self.c!r})^(n+1)"

    def range_from(self, k: int):
        return self.c, self.c

    def spec(self) -> dict:
        return {"q": {"kind": "constant", "params": {"c": repr(self.c)}}, "q_inf": repr(self.q_inf)}


@dataclass(frozen=True)
class HarmonicQ(QRule):
    """``q_i = offset + a / (i + b)``."""

    a: float
    b: float
    offset: float = 0.0
    q_inf: float = None

    def __post_init__(self):
        if self.q_inf is None:
            object.__setattr__(self, "q_inf", self.offset)

    def __call__(self, i: int) -> float:
        return self.offset + self.a / (i + self.b)

    def values(self, n: int) -> np.ndarray:
        return self.offset + self.a / (np.arange(n) + self.b)

    @property
    def limit(self) -> float:
        return self.offset

    def series_certificate(self):
        if self.offset > 0:
            return "convergent", f"lim inf q_i = {self.offset!r} > 0 bounds the products geometrically"
        # prod_{i<=n} (1 - a/(i+b)) is of exact order n^(-a)
        if self.a > 1:
            return "convergent", f"products ~ n^-{self.a!r} with exponent > 1"
        return "divergent", f"products ~ n^-{self.a!r} with exponent <= 1"

    def range_from(self, k: int):
        vals = (self(k), self.offset)
        return min(vals), max(vals)

    def spec(self) -> dict:
        return {
            "q": {"kind": "harmonic_shift", "params": {"a": repr(self.a), "b": repr(self.b), "offset": repr(self.offset)}},
            "q_inf": repr(self.q_inf),
        }


@dataclass(frozen=True)
class RationalQ(QRule):
    """``q_i = P(i) / Q(i)`` with coefficient lists, highest degree first."""

    num: tuple
    den: tuple
    q_inf: float = None

    def __post_init__(self):
        num = np.trim_zeros(np.asarray(self.num, dtype=float), "f")
        den = np.trim_zeros(np.asarray(self.den, dtype=float), "f")
        if den.size == 0:
            raise BadQ("zero denominator")
        object.__setattr__(self, "num", tuple(num.tolist()))
        object.__setattr__(self, "den", tuple(den.tolist()))
        if self.q_inf is None:
            object.__setattr__(self, "q_inf", self.limit)

    def __call__(self, i: int) -> float:
        return float(np.polyval(self.num, i) / np.polyval(self.den, i)) if self.num else 0.0

    def values(self, n: int) -> np.ndarray:
        i = np.arange(n, dtype=float)
        if not self.num:
            return np.zeros(n)
        return np.polyval(self.num, i) / np.polyval(self.den, i)

    @property
    def limit(self) -> float:
        dn, dd = len(self.num) - 1, len(self.den) - 1
        if not self.num or dn < dd:
            return 0.0
        if dn == dd:
            return self.num[0] / self.den[0]
        raise BadQ("q_i is unbounded")

    def series_certificate(self):
        if not self.num:
            return "divergent", "q_i = 0 never renews"
        dn, dd = len(self.num) - 1, len(self.den) - 1
        if dn == dd:
            if self.limit > 0:
                return "convergent", f"q_i -> {self.limit!r} > 0"
            return None
        gap = dd - dn
        c = self.num[0] / self.den[0]
        if gap >= 2:
            return "divergent", "sum q_i < inf so the products stay bounded below"
        # q_i = c/i + O(1/i^2): products of exact order n^(-c)
        if c > 1:
            return "convergent", f"products ~ n^-{c!r} with exponent > 1"
        return "divergent", f"products ~ n^-{c!r} with exponent <= 1"

    def range_from(self, k: int):
        # rational functions are monotone between critical points
        dnum = np.polysub(np.polymul(np.polyder(self.num), self.den), np.polymul(self.num, np.polyder(self.den))) if self.num else np.zeros(1)
        pts = [float(k)]
        for r in np.atleast_1d(np.roots(np.trim_zeros(np.atleast_1d(dnum), "f"))) if np.any(dnum) else []:
            if abs(r.imag) < 1e-12 and r.real > k:
                pts.extend([math.floor(r.real), math.ceil(r.real)])
        vals = [self(int(p)) for p in pts if p >= k] + [self.limit]
        return min(vals), max(vals)

    def spec(self) -> dict:
        return {
            "q": {"kind": "custom_rational", "params": {"num": [repr(c) for c in self.num], "den": [repr(c) for c in self.den]}},
            "q_inf": repr(self.q_inf),
        }


def validate_q(q: QRule, terms: int = 10_000) -> None:
    vals = q.values(terms)
    if not np.all((vals > 0) & (vals < 1)):
        bad = int(np.argmax(~((vals > 0) & (vals < 1))))
        raise BadQ(f"q_{bad} = {vals[bad]!r} is outside (0, 1)")
    if not (0.0 <= q.q_inf <= 1.0):
        raise BadQ("q_inf must lie in [0, 1]")


class RenewalKernel(Kernel):
    """State: trailing-zero run length (``inf`` for the all-zero past)."""

    tag = "renewal"
    alphabet = Alphabet.finite(2)
    labels = ["0", "1"]
    collapsible = True

    def __init__(self, q: QRule):
        validate_q(q)
        self.q = q
        iso = []
        if q.q_inf == 0.0:
            iso.append((PastSpec((0,)), 1))
        elif q.q_inf == 1.0:
            iso.append((PastSpec((0,)), 0))
        self.zeros = ZeroDeclaration(isolated_zeros=iso, complete=True)
        self.continuous = q.limit == q.q_inf
        if isinstance(q, ConstantQ) and q.q_inf == q.c:
            self.markov_order = 0

    def state_init(self, past: PastSpec):
        return past.run_length(0)

    def state_update(self, state, symbol: int):
        return 0 if symbol == 1 else state + 1

    def prob_one(self, state) -> float:
        return self.q.q_inf if state == math.inf else self.q(int(state))

    def eval(self, state, symbol: int, tol: float = 0.0) -> ProbInterval:
        p = self.prob_one(state)
        return ProbInterval.point(p if symbol == 1 else 1.0 - p)

    def variation_bounds(self, k: int) -> tuple[float, float]:
        if k == 0:
            lo, hi = self.q.range_from(0)
        else:
            # sharing k symbols: identical unless both have >= k trailing zeros
            lo, hi = self.q.range_from(k)
        lo, hi = min(lo, self.q.q_inf), max(hi, self.q.q_inf)
        return 0.0, 2.0 * (hi - lo)

    def spec(self) -> dict:
        return {"kernel": "renewal", "params": self.q.spec()}


def make_renewal_kernel(q: QRule) -> RenewalKernel:
    return RenewalKernel(q)


@dataclass(frozen=True)
class RenewalClassification:
    case: str | None  # UniqueTrivial_1a | PhaseTransition_1b | NoStationary_2a | UniqueRenewal_2b
    q_inf: float
    series_verdict: str  # divergent | convergent | inconclusive
    partial_sum: float
    terms: int
    reason: str = ""

    def to_json(self) -> dict:
        return {
            "case": self.case,
            "q_inf": self.q_inf,
            "series_verdict": self.series_verdict,
            "partial_sum": self.partial_sum,
            "terms": self.terms,
            "reason": self.reason,
        }


CASES = {
    (False, "divergent"): "UniqueTrivial_1a",
    (False, "convergent"): "PhaseTransition_1b",
    (True, "divergent"): "NoStationary_2a",
    (True, "convergent"): "UniqueRenewal_2b",
}


def classify_renewal(q: QRule, terms: int = 10**6, tol: float = 1e-12) -> RenewalClassification:
    """Place ``q`` in the four-case existence/uniqueness table.

    Decisive series verdicts come only from the rule's certificate; the
    numeric partial sum over ``terms`` terms is reported alongside.  Without a
    certificate the verdict is ``inconclusive`` and no case is assigned.
    """
    if terms < 1:
        raise ValueError("terms must be >= 1")
    validate_q(q, min(terms, 10_000))
    logs = np.cumsum(np.log1p(-q.values(terms)))
    partial = float(math.fsum(np.exp(logs)))
    cert = q.series_certificate()
    if cert is None:
        return RenewalClassification(None, q.q_inf, "inconclusive", partial, terms, "no certificate for this rule")
    verdict, reason = cert
    return RenewalClassification(CASES[(q.q_inf > tol, verdict)], q.q_inf, verdict, partial, terms, reason)
