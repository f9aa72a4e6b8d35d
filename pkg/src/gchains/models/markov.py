"""Finite-order Markov kernels given by a transition table."""

from __future__ import annotations

import itertools
import math

from ..errors import BadRow
from ..intervals import ProbInterval
from ..kernel import Alphabet, Kernel
from ..words import PastSpec
from ..zeros import ZeroDeclaration


class MarkovKernel(Kernel):
    """``g(x a) = table[x_{-m+1}^0][a]`` for a fixed order ``m``.

    The state is the tuple of the last ``m`` symbols, so evaluation is exact
    and equal states collapse.
    """

    tag = "markov"
    collapsible = True

    def __init__(self, order: int, table: dict, size: int, labels=None):
        self.order = order
        self.markov_order = order
        self.table = table
        self.alphabet = Alphabet.finite(size)
        self.labels = list(labels) if labels is not None else [str(a) for a in range(size)]
        zeros = [(ctx, a) for ctx, row in table.items() for a, p in enumerate(row) if p == 0.0]
        self.zeros = ZeroDeclaration(cylinder_zeros=zeros, complete=True)
        positives = [p for row in table.values() for p in row if p > 0]
        self.positive_floor = min(positives)

    def state_init(self, past: PastSpec):
        return past.suffix(self.order)

    def state_update(self, state, symbol: int):
        return (state + (symbol,))[1:]

    def eval(self, state, symbol: int, tol: float = 0.0) -> ProbInterval:
        return ProbInterval.point(self.table[state][symbol])

    def variation_bounds(self, k: int) -> tuple[float, float]:
        if k >= self.order:
            return 0.0, 0.0
        # pasts sharing the last k symbols differ only in the older order-k ones
        best = 0.0
        groups: dict = {}
        for ctx, row in self.table.items():
            groups.setdefault(ctx[self.order - k:], []).append(row)
        for rows in groups.values():
            for r1, r2 in itertools.combinations(rows, 2):
                best = max(best, math.fsum(abs(p - q) for p, q in zip(r1, r2)))
        return best, best

    def spec(self) -> dict:
        rows = [[repr(p) for p in self.table[ctx]] for ctx in sorted(self.table)]
        return {"kernel": "markov", "params": {"order": self.order, "rows": rows, "labels": self.labels}}


def make_markov_kernel(order: int, rows, size: int | None = None, labels=None) -> MarkovKernel:
    """Build an order-``order`` Markov kernel.

    ``rows`` is either a list of rows ordered lexicographically by context
    (symbol indices, oldest first) or a mapping from context tuples to rows.
    """
    if order < 1:
        raise BadRow("order must be >= 1")
    if isinstance(rows, dict):
        table = {tuple(k): tuple(float(p) for p in v) for k, v in rows.items()}
        if size is None:
            size = len(next(iter(table.values())))
    else:
        rows = [tuple(float(p) for p in r) for r in rows]
        if size is None:
            size = len(rows[0])
        contexts = list(itertools.product(range(size), repeat=order))
        if len(rows) != len(contexts):
            raise BadRow(f"expected {len(contexts)} rows for order {order}, got {len(rows)}")
        table = dict(zip(contexts, rows))
    for ctx in itertools.product(range(size), repeat=order):
        if ctx not in table:
            raise BadRow(f"missing row for context {ctx}")
    for ctx, row in table.items():
        if len(row) != size or any(p < 0 or p > 1 for p in row):
            raise BadRow(f"row {ctx} is not a probability vector over {size} symbols")
        if abs(math.fsum(row) - 1.0) > 1e-12:
            raise BadRow(f"row {ctx} sums to {math.fsum(row)!r}")
    return MarkovKernel(order, table, size, labels)
