"""Finite words and eventually periodic left-infinite pasts.

Symbols are nonnegative integers.  A word is a tuple of symbols written in
chronological order, so ``word[-1]`` is the most recent symbol.  A past
``PastSpec(tail, transient)`` stands for the left-infinite sequence
``... tail tail transient`` whose last symbol sits at coordinate 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

Word = tuple  # tuple[int, ...]


def _primitive_root(block: tuple) -> tuple:
    n = len(block)
    for p in range(1, n + 1):
        if n % p == 0 and block[:p] * (n // p) == block:
            return block[:p]
    return block


@dataclass(frozen=True)
class PastSpec:
    """Canonical eventually periodic past.

    Two specs denoting the same sequence compare equal: the tail is reduced
    to its primitive period and leading transient symbols that continue the
    periodic pattern are absorbed into a rotated tail.
    """

    tail: tuple
    transient: tuple = ()

    def __post_init__(self):
        tail = tuple(int(s) for s in self.tail)
        transient = tuple(int(s) for s in self.transient)
        if not tail:
            raise ValueError("PastSpec tail must be nonempty")
        if any(s < 0 for s in tail + transient):
            raise ValueError("symbols are nonnegative integers")
        tail = _primitive_root(tail)
        while transient and transient[0] == tail[0]:
            tail = tail[1:] + tail[:1]
            transient = transient[1:]
        object.__setattr__(self, "tail", tail)
        object.__setattr__(self, "transient", transient)

    @classmethod
    def constant(cls, symbol: int) -> "PastSpec":
        return cls((symbol,))

    @property
    def period(self) -> int:
        return len(self.tail)

    def lag(self, i: int) -> int:
        """Symbol at coordinate ``-i``."""
        n = len(self.transient)
        if i < n:
            return self.transient[n - 1 - i]
        j = (i - n) % len(self.tail)
        return self.tail[len(self.tail) - 1 - j]

    def lags(self) -> Iterator[int]:
        yield from reversed(self.transient)
        p = len(self.tail)
        while True:
            for j in range(p - 1, -1, -1):
                yield self.tail[j]

    def recent(self, n: int) -> list:
        """The ``n`` most recent symbols, newest first."""
        out = list(reversed(self.transient[max(0, len(self.transient) - n):]))
        if len(out) < n:
            back = self.tail[::-1]
            reps = (n - len(out)) // len(back) + 1
            out.extend((back * reps)[: n - len(out)])
        return out

    def suffix(self, n: int) -> tuple:
        """The last ``n`` symbols in chronological order."""
        return tuple(self.lag(i) for i in range(n - 1, -1, -1))

    def extend(self, word: Sequence[int]) -> "PastSpec":
        return PastSpec(self.tail, self.transient + tuple(word))

    def drop(self, n: int) -> "PastSpec":
        """Remove the ``n`` most recent symbols."""
        if n <= len(self.transient):
            return PastSpec(self.tail, self.transient[: len(self.transient) - n])
        r = (n - len(self.transient)) % len(self.tail)
        p = len(self.tail)
        return PastSpec(self.tail[p - r:] + self.tail[: p - r])

    def run_length(self, symbol: int) -> float:
        """Number of trailing copies of ``symbol``; ``inf`` for a constant past."""
        count = 0
        for s in reversed(self.transient):
            if s != symbol:
                return count
            count += 1
        if all(s == symbol for s in self.tail):
            return math.inf
        for s in reversed(self.tail):
            if s != symbol:
                return count
            count += 1
        return count  # unreachable

    def contains_substring(self, word: Sequence[int]) -> bool:
        """Whether ``word`` occurs somewhere inside the infinite sequence."""
        word = tuple(word)
        if not word:
            return True
        reps = len(word) // len(self.tail) + 2
        seq = self.tail * reps + self.transient
        m = len(word)
        return any(seq[i:i + m] == word for i in range(len(seq) - m + 1))

    def __str__(self) -> str:
        return format_past(self)


class History:
    """Persistent past: a base ``PastSpec`` followed by appended symbols.

    Appending is O(1) and shares structure, which keeps long simulated paths
    cheap for kernels that read an unbounded stretch of the past.
    """

    __slots__ = ("base", "last", "parent", "depth")

    def __init__(self, base: PastSpec, last=None, parent=None, depth=0):
        self.base = base
        self.last = last
        self.parent = parent
        self.depth = depth

    def push(self, symbol: int) -> "History":
        return History(self.base, symbol, self, self.depth + 1)

    def lags(self) -> Iterator[int]:
        node = self
        while node.depth:
            yield node.last
            node = node.parent
        yield from self.base.lags()

    def lag(self, i: int) -> int:
        node = self
        while node.depth:
            if i == 0:
                return node.last
            i -= 1
            node = node.parent
        return self.base.lag(i)

    def recent(self, n: int) -> list:
        """The ``n`` most recent symbols, newest first."""
        out = []
        node = self
        while node.depth and len(out) < n:
            out.append(node.last)
            node = node.parent
        if len(out) < n:
            out.extend(node.base.recent(n - len(out)))
        return out

    def appended(self) -> tuple:
        out = []
        node = self
        while node.depth:
            out.append(node.last)
            node = node.parent
        return tuple(reversed(out))

    def run_length(self, symbol: int) -> float:
        count = 0
        node = self
        while node.depth:
            if node.last != symbol:
                return count
            count += 1
            node = node.parent
        return count + self.base.run_length(symbol)

    def to_past(self) -> PastSpec:
        return self.base.extend(self.appended())

    def __repr__(self) -> str:
        return f"History({self.to_past()})"


def format_word(word: Sequence[int], labels: Sequence[str] | None = None) -> str:
    toks = [labels[s] if labels is not None and s < len(labels) else str(s) for s in word]
    if all(len(t) == 1 for t in toks):
        return "".join(toks)
    return ",".join(toks)


def format_past(past: PastSpec, labels: Sequence[str] | None = None) -> str:
    tail = format_word(past.tail, labels)
    if len(past.tail) > 1:
        tail = f"({tail})"
    out = f"{tail}^inf"
    if past.transient:
        out += " " + format_word(past.transient, labels)
    return out


def parse_word(text: str, labels: Sequence[str] | None = None) -> tuple:
    """Parse ``"0110"`` or ``"-1,1,1"`` into a word of symbol indices."""
    text = text.strip()
    if not text:
        return ()
    lookup = {lab: i for i, lab in enumerate(labels)} if labels is not None else None
    if "," in text:
        toks = [t.strip() for t in text.split(",") if t.strip()]
    elif lookup is not None and text in lookup:
        toks = [text]
    elif " " in text:
        toks = text.split()
    else:
        toks = list(text)
    out = []
    for t in toks:
        if lookup is not None:
            if t not in lookup:
                raise ValueError(f"unknown symbol label {t!r}")
            out.append(lookup[t])
        else:
            if not t.isdigit():
                raise ValueError(f"bad symbol {t!r}")
            out.append(int(t))
    return tuple(out)


def parse_past(text: str, labels: Sequence[str] | None = None) -> PastSpec:
    """Parse the command-line past syntax ``"tail^inf transient"``.

    ``"0^inf 11"`` is ...00011, ``"(01)^inf"`` is ...0101 and
    ``"-1^inf 1,-1"`` uses comma-separated labels.
    """
    text = text.strip()
    if "^inf" not in text:
        raise ValueError(f"past {text!r} lacks a '^inf' tail")
    head, _, rest = text.partition("^inf")
    head = head.strip()
    if head.startswith("(") and head.endswith(")"):
        head = head[1:-1]
    tail = parse_word(head, labels)
    transient = parse_word(rest.strip(), labels)
    return PastSpec(tail, transient)
