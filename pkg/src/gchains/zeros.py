"""Declared zero structure of a kernel.

Structural analysis never infers nullity from small floats; everything it
knows about zeros comes from a :class:`ZeroDeclaration`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .words import History, PastSpec


@dataclass(frozen=True)
class CylinderRule:
    """Zero pattern over a countable alphabet that a finite list cannot hold.

    ``predicate(context, symbol)`` is evaluated on the last ``context_len``
    symbols of the past.
    """

    context_len: int
    predicate: Callable[[tuple, int], bool]
    description: str = ""


@dataclass(frozen=True)
class ZeroDeclaration:
    cylinder_zeros: tuple = ()  # ((context, symbol), ...)
    isolated_zeros: tuple = ()  # ((PastSpec, symbol), ...)
    complete: bool = True
    rules: tuple = field(default=())  # CylinderRule, ...

    def __post_init__(self):
        cyl = tuple((tuple(c), int(a)) for c, a in self.cylinder_zeros)
        iso = tuple((p, int(a)) for p, a in self.isolated_zeros)
        object.__setattr__(self, "cylinder_zeros", cyl)
        object.__setattr__(self, "isolated_zeros", iso)
        object.__setattr__(self, "rules", tuple(self.rules))
        for past, a in iso:
            if not isinstance(past, PastSpec):
                raise TypeError("isolated zeros need PastSpec pasts")
            for ctx, b in cyl:
                if b == a and past.suffix(len(ctx)) == ctx:
                    raise ValueError(
                        f"isolated zero {past} -> {a} lies inside cylinder zero {ctx} -> {b}"
                    )

    @property
    def max_context(self) -> int:
        lens = [len(c) for c, _ in self.cylinder_zeros] + [r.context_len for r in self.rules]
        return max(lens, default=0)

    @property
    def isolated_pasts(self) -> tuple:
        seen = []
        for p, _ in self.isolated_zeros:
            if p not in seen:
                seen.append(p)
        return tuple(seen)

    def is_cylinder_zero(self, context, symbol: int) -> bool:
        """Whether ``g(y context symbol) = 0`` for every ``y`` by declaration."""
        context = tuple(context)
        for ctx, a in self.cylinder_zeros:
            if a == symbol and len(ctx) <= len(context) and context[len(context) - len(ctx):] == ctx:
                return True
        for r in self.rules:
            if len(context) >= r.context_len and r.predicate(context[len(context) - r.context_len:], symbol):
                return True
        return False

    def forbids(self, past, symbol: int) -> bool:
        """Whether the declaration makes ``g(past symbol)`` exactly zero.

        ``past`` is a :class:`PastSpec` or :class:`History`.
        """
        lag = past.lag
        depth = self.max_context
        if depth:
            ctx = tuple(lag(i) for i in range(depth - 1, -1, -1))
            if self.is_cylinder_zero(ctx, symbol):
                return True
        for p, a in self.isolated_zeros:
            if a != symbol or any(lag(i) != p.lag(i) for i in range(32)):
                continue
            full = past.to_past() if isinstance(past, History) else past
            if p == full:
                return True
        return False
