"""Kernel abstraction and the core operations on it.

A kernel ``g`` assigns to every (infinite past, next symbol) pair a
transition probability.  Concrete kernels live in :mod:`gchains.models`;
this module defines the contract they satisfy and the operations that only
rely on that contract: single evaluation, the iterated kernel ``g_n``,
variation-rate bounds, and one summand of the square-summability series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Hashable, Sequence

import numpy as np

from .errors import AlphabetInfinite, BudgetExceeded, NoAnalyticBound, TolUnachievable, UnknownSymbol
from .intervals import Interval, ProbInterval, as_interval, sqrt_interval
from .words import PastSpec
from .zeros import ZeroDeclaration

DEFAULT_TOL = 1e-12
DEFAULT_NODE_BUDGET = 10**6


@dataclass(frozen=True)
class Alphabet:
    """Finite alphabet ``{0, ..., size-1}`` or the countable set of naturals.

    Countable alphabets are enumerated in increasing order until the kernel
    certifies that the remaining mass is at most ``truncation_mass``.
    """

    size: int | None = None
    truncation_mass: float = 1e-12

    def __post_init__(self):
        if self.size is not None and self.size < 1:
            raise ValueError("finite alphabet needs size >= 1")
        if self.size is None and not (0.0 < self.truncation_mass < 1.0):
            raise ValueError("truncation mass must lie in (0, 1)")

    @classmethod
    def finite(cls, size: int) -> "Alphabet":
        return cls(size=size)

    @classmethod
    def countable(cls, truncation_mass: float = 1e-12) -> "Alphabet":
        return cls(size=None, truncation_mass=truncation_mass)

    @property
    def is_finite(self) -> bool:
        return self.size is not None

    def symbols(self) -> range:
        if self.size is None:
            raise AlphabetInfinite("cannot list a countable alphabet")
        return range(self.size)

    def __contains__(self, a) -> bool:
        if not isinstance(a, (int, np.integer)) or a < 0:
            return False
        return self.size is None or a < self.size


@dataclass(frozen=True)
class Row:
    """Enumerated conditional law: intervals for ``symbols`` plus a mass bound
    for every symbol not listed."""

    symbols: tuple
    probs: tuple
    tail_mass: float = 0.0

    def get(self, a: int) -> ProbInterval | None:
        try:
            return self.probs[self.symbols.index(a)]
        except ValueError:
            return None


class Kernel:
    """Base class for probability kernels with a past-sufficient state.

    Subclasses implement :meth:`state_init`, :meth:`state_update` and
    :meth:`eval`, and set ``alphabet``, ``labels`` and ``zeros``.  The
    contract is ``state_update(state_init(p), a) ~ state_init(p.extend([a]))``
    in the sense that every evaluation agrees bit for bit.
    """

    tag = "kernel"
    alphabet: Alphabet
    zeros: ZeroDeclaration = ZeroDeclaration(complete=False)
    labels: Sequence[str] | None = None
    # Number of past symbols the kernel reads; None for infinite memory.
    markov_order: int | None = None
    # A positive lower bound on inf{g(x) : g(x) > 0}, when known.
    positive_floor: float | None = None
    continuous: bool = True
    # States are hashable values and equal states evaluate identically.
    collapsible: bool = False

    def state_init(self, past: PastSpec):
        raise NotImplementedError

    def state_update(self, state, symbol: int):
        raise NotImplementedError

    def eval(self, state, symbol: int, tol: float = DEFAULT_TOL) -> ProbInterval:
        raise NotImplementedError

    def row(self, state, tol: float = DEFAULT_TOL) -> Row:
        syms = tuple(self.alphabet.symbols())
        return Row(syms, tuple(self.eval(state, a, tol) for a in syms))

    def variation_bounds(self, k: int) -> tuple[float, float]:
        """Analytic ``(lower, upper)`` bounds on ``var_k``."""
        raise NoAnalyticBound(f"{self.tag} kernel has no analytic variation bound")

    def finite_quotient(self):
        """For countable alphabets: representative symbols of classes that
        share one zero pattern, with class labels.  ``None`` if unsupported."""
        return None

    def canonical_tails(self) -> list[tuple]:
        """Tails used to build probe pasts: constant tails plus the tails of
        declared isolated-zero pasts."""
        if self.alphabet.is_finite:
            tails = [(a,) for a in self.alphabet.symbols()]
        else:
            tails = [(0,), (1,)]
        for p in self.zeros.isolated_pasts:
            if p.tail not in tails:
                tails.append(p.tail)
        return tails

    def label(self, a: int) -> str:
        if self.labels is not None and a < len(self.labels):
            return self.labels[a]
        return str(a)

    def spec(self) -> dict[str, Any]:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.tag}>"


def _check_tol(tol: float) -> None:
    if not tol > 0:
        raise ValueError("tol must be positive")


def checked_eval(kernel: Kernel, state, symbol: int, tol: float) -> ProbInterval:
    p = kernel.eval(state, symbol, tol)
    if p.width > tol:
        raise TolUnachievable(f"{kernel.tag}: width {p.width:g} exceeds tol {tol:g}")
    return p


def eval_kernel(kernel: Kernel, past: PastSpec, symbol: int, tol: float = DEFAULT_TOL) -> ProbInterval:
    """Enclosure of ``g(past symbol)`` of width at most ``tol``."""
    _check_tol(tol)
    if symbol not in kernel.alphabet:
        raise UnknownSymbol(f"symbol {symbol!r} not in alphabet")
    return checked_eval(kernel, kernel.state_init(past), symbol, tol)


def _word_prob(kernel: Kernel, state, word: Sequence[int], tol: float) -> tuple[float, float]:
    lo, hi = 1.0, 1.0
    for a in word:
        p = checked_eval(kernel, state, a, tol)
        lo *= p.lo
        hi *= p.hi
        if hi == 0.0:
            return 0.0, 0.0
        state = kernel.state_update(state, a)
    return lo, hi


def propagate(kernel: Kernel, state, steps: int, tol: float, budget: int = DEFAULT_NODE_BUDGET):
    """Push the unit mass at ``state`` forward ``steps`` free steps.

    Returns ``(nodes, lost)`` where ``nodes`` is a list of
    ``(state, lo, hi)`` and ``lost`` bounds the mass that escaped into
    unenumerated symbols of a countable alphabet.  Equal states are merged
    when the kernel is collapsible.
    """
    nodes = [(state, 1.0, 1.0)]
    lost = 0.0
    created = 1
    for _ in range(steps):
        if kernel.collapsible:
            merged: dict[Hashable, list] = {}
        else:
            merged = None
        out = []
        for s, lo, hi in nodes:
            row = kernel.row(s, tol)
            lost += hi * row.tail_mass
            for a, p in zip(row.symbols, row.probs):
                if p.is_zero:
                    continue
                if p.width > tol:
                    raise TolUnachievable(f"{kernel.tag}: width {p.width:g} exceeds tol {tol:g}")
                s2 = kernel.state_update(s, a)
                if merged is not None:
                    acc = merged.get(s2)
                    if acc is None:
                        merged[s2] = [lo * p.lo, hi * p.hi]
                        created += 1
                    else:
                        acc[0] += lo * p.lo
                        acc[1] += hi * p.hi
                else:
                    out.append((s2, lo * p.lo, hi * p.hi))
                    created += 1
                if created > budget:
                    raise BudgetExceeded(f"more than {budget} nodes; lower n or use Monte-Carlo")
        nodes = [(s, v[0], v[1]) for s, v in merged.items()] if merged is not None else out
    return nodes, lost


def iterate_kernel(
    kernel: Kernel,
    past: PastSpec,
    word: Sequence[int],
    n: int,
    tol: float = DEFAULT_TOL,
    budget: int = DEFAULT_NODE_BUDGET,
) -> ProbInterval:
    """Enclosure of the iterated kernel ``g_n(past, word)``: the probability
    that ``word`` is emitted after ``n - 1`` free steps."""
    _check_tol(tol)
    if n < 1:
        raise ValueError("n must be >= 1")
    word = tuple(word)
    if not word:
        raise ValueError("word must be nonempty")
    for a in word:
        if a not in kernel.alphabet:
            raise UnknownSymbol(f"symbol {a!r} not in alphabet")
    nodes, lost = propagate(kernel, kernel.state_init(past), n - 1, tol, budget)
    lo = hi = 0.0
    for s, mlo, mhi in nodes:
        wlo, whi = _word_prob(kernel, s, word, tol)
        lo += mlo * wlo
        hi += mhi * whi
    return ProbInterval(lo, hi + lost)


@dataclass(frozen=True)
class VariationBounds:
    lower: float
    upper: float


@dataclass(frozen=True)
class Sampled:
    probes: int = 200
    seed: int = 0


def _random_past(rng: np.random.Generator, size: int) -> PastSpec:
    tail = rng.integers(0, size, size=int(rng.integers(1, 4)))
    transient = rng.integers(0, size, size=int(rng.integers(0, 7)))
    return PastSpec(tuple(int(s) for s in tail), tuple(int(s) for s in transient))


def variation_rate(kernel: Kernel, k: int, mode="analytic", tol: float = 1e-10) -> VariationBounds:
    """Bounds on ``var_k(g)``: the largest total discrepancy between next-symbol
    laws of two pasts that agree on their last ``k`` symbols.

    ``mode`` is ``"analytic"`` or a :class:`Sampled` instance.  In sampled
    mode the lower bound is the best discrepancy found over random past pairs
    (always including pairs with distinct constant tails); the upper bound is
    the analytic one when the kernel has it, else the trivial value 2.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    if mode == "analytic":
        lo, hi = kernel.variation_bounds(k)
        return VariationBounds(lo, hi)
    if not isinstance(mode, Sampled):
        raise ValueError(f"unknown mode {mode!r}")
    if not kernel.alphabet.is_finite:
        raise AlphabetInfinite("sampled variation needs a finite alphabet")
    try:
        upper = kernel.variation_bounds(k)[1]
    except NoAnalyticBound:
        upper = 2.0
    size = kernel.alphabet.size
    rng = np.random.default_rng(mode.seed)
    pairs = []
    for c in range(size):
        for d in range(size):
            if c != d:
                shared = tuple(int(s) for s in rng.integers(0, size, size=k))
                pairs.append((PastSpec((c,), shared), PastSpec((d,), shared)))
    for _ in range(mode.probes):
        shared = tuple(int(s) for s in rng.integers(0, size, size=k))
        pairs.append((_random_past(rng, size).extend(shared), _random_past(rng, size).extend(shared)))
    best = 0.0
    for x, y in pairs:
        sx, sy = kernel.state_init(x), kernel.state_init(y)
        total = 0.0
        for a in range(size):
            px, py = checked_eval(kernel, sx, a, tol), checked_eval(kernel, sy, a, tol)
            total += max(0.0, px.lo - py.hi, py.lo - px.hi)
        best = max(best, total)
    return VariationBounds(min(best, upper), upper)


def paired_rows(kernel: Kernel, sx, sy, tol: float):
    """Aligned rows for two states: ``(symbols, px, py, tail)`` where ``tail``
    bounds the mass either side puts outside ``symbols``."""
    rx, ry = kernel.row(sx, tol), kernel.row(sy, tol)
    if rx.symbols == ry.symbols:
        return rx.symbols, rx.probs, ry.probs, rx.tail_mass + ry.tail_mass
    syms = tuple(sorted(set(rx.symbols) | set(ry.symbols)))
    px = tuple(rx.get(a) or kernel.eval(sx, a, tol) for a in syms)
    py = tuple(ry.get(a) or kernel.eval(sy, a, tol) for a in syms)
    return syms, px, py, rx.tail_mass + ry.tail_mass


def w2_term(
    kernel: Kernel,
    x: PastSpec,
    y: PastSpec,
    w: Sequence[int],
    use_sqrt: bool = True,
    tol: float = DEFAULT_TOL,
) -> Interval:
    """Enclosure of ``sum_a (h(x w a) - h(y w a))**2`` with ``h = sqrt(g)``
    or ``h = g``."""
    _check_tol(tol)
    w = tuple(w)
    if len(w) < 1:
        raise ValueError("w must have length >= 1")
    sx, sy = kernel.state_init(x), kernel.state_init(y)
    for a in w:
        sx, sy = kernel.state_update(sx, a), kernel.state_update(sy, a)
    return row_discrepancy(kernel, sx, sy, use_sqrt, tol)


def row_discrepancy(kernel: Kernel, sx, sy, use_sqrt: bool, tol: float) -> Interval:
    syms, px, py, tail = paired_rows(kernel, sx, sy, tol)
    total = Interval(0.0, 0.0)
    h = sqrt_interval if use_sqrt else as_interval
    for p, q in zip(px, py):
        if p.width > tol or q.width > tol:
            raise TolUnachievable(f"{kernel.tag}: interval wider than {tol:g}")
        total = total + (h(p) - h(q)).square()
    # unlisted symbols: (sqrt p - sqrt q)^2 <= p + q, (p - q)^2 <= p + q
    return Interval(total.lo, total.hi + tail)


def row_discrepancy_mid(kernel: Kernel, sx, sy, use_sqrt: bool, tol: float) -> float:
    """Point value of the discrepancy using interval midpoints."""
    syms, px, py, _ = paired_rows(kernel, sx, sy, tol)
    total = 0.0
    for p, q in zip(px, py):
        a, b = p.mid, q.mid
        d = math.sqrt(a) - math.sqrt(b) if use_sqrt else a - b
        total += d * d
    return total
