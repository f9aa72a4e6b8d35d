"""Non-Markovian random walk on a directed graph.

From vertex ``x_0`` the walk moves along an out-edge ``x_0 -> b`` with
probability proportional to ``exp(bias * h_b(x))`` where

    h_b(x) = (1 - decay) * sum_{i >= 0} decay**i * 1{x_{-i} = b}

is an exponentially weighted visit frequency.  ``bias > 0`` favours
revisiting, ``bias < 0`` favours exploring, ``decay`` sets the continuity
rate.  The rule is one concrete choice; only the adjacency matters for the
zero structure.
"""

from __future__ import annotations

import math

from ..errors import SinkVertex, SpecError, TolUnachievable
from ..intervals import ProbInterval
from ..kernel import Alphabet, Kernel, Row
from ..words import History, PastSpec
from ..zeros import ZeroDeclaration


class GraphWalkKernel(Kernel):
    tag = "graph_walk"

    def __init__(self, edges, size: int, bias: float = 0.0, decay: float = 0.5, labels=None):
        if not (0.0 <= decay < 1.0):
            raise SpecError("decay must lie in [0, 1)")
        self.edges = tuple(sorted({(int(a), int(b)) for a, b in edges}))
        self.size = size
        self.bias = float(bias)
        self.decay = float(decay)
        self.alphabet = Alphabet.finite(size)
        self.labels = list(labels) if labels is not None else [str(a) for a in range(size)]
        self.out = {a: tuple(b for (u, b) in self.edges if u == a) for a in range(size)}
        for a, succ in self.out.items():
            if not succ:
                raise SinkVertex(f"vertex {a} has no out-edge")
        zeros = [((a,), b) for a in range(size) for b in range(size) if b not in self.out[a]]
        self.zeros = ZeroDeclaration(cylinder_zeros=zeros, complete=True)
        self.positive_floor = math.exp(-2 * abs(self.bias)) / max(len(s) for s in self.out.values())
        if self.bias == 0.0 or self.decay == 0.0:
            self.markov_order = 1

    def state_init(self, past: PastSpec):
        return History(past)

    def state_update(self, state, symbol: int):
        return state.push(symbol)

    def _weights(self, state, tol: float):
        """Per-vertex visit weights truncated at a lag chosen from ``tol``,
        plus the bound on the omitted mass."""
        if self.decay == 0.0:
            h = [0.0] * self.size
            h[state.lag(0)] = 1.0
            return h, 0.0
        lag_cap = max(1, math.ceil(math.log(max(tol, 1e-300) / (4 * abs(self.bias) + 1e-300)) / math.log(self.decay)))
        h = [0.0] * self.size
        w = 1.0 - self.decay
        for b in state.recent(lag_cap + 1):
            h[b] += w
            w *= self.decay
        return h, self.decay ** (lag_cap + 1)

    def row(self, state, tol: float = 1e-12) -> Row:
        x0 = state.lag(0)
        succ = self.out[x0]
        probs = [ProbInterval.point(0.0)] * self.size
        if len(succ) == 1 or self.bias == 0.0:
            for b in succ:
                probs[b] = ProbInterval.point(1.0 / len(succ))
            return Row(tuple(range(self.size)), tuple(probs))
        h, rem = self._weights(state, tol)
        beta = self.bias
        lo_e = {b: math.exp(beta * h[b] + min(0.0, beta * rem)) for b in succ}
        hi_e = {b: math.exp(beta * h[b] + max(0.0, beta * rem)) for b in succ}
        mid_e = {b: math.exp(beta * h[b]) for b in succ}
        total_mid = math.fsum(mid_e.values())
        for b in succ:
            others_hi = math.fsum(hi_e[c] for c in succ if c != b)
            others_lo = math.fsum(lo_e[c] for c in succ if c != b)
            lo = lo_e[b] / (lo_e[b] + others_hi)
            hi = hi_e[b] / (hi_e[b] + others_lo)
            if rem == 0.0:
                lo = hi = mid_e[b] / total_mid
            probs[b] = ProbInterval(lo, hi)
            if probs[b].width > tol:
                raise TolUnachievable("graph walk truncation too coarse")
        return Row(tuple(range(self.size)), tuple(probs))

    def eval(self, state, symbol: int, tol: float = 1e-12) -> ProbInterval:
        return self.row(state, tol).probs[symbol]

    def variation_bounds(self, k: int) -> tuple[float, float]:
        if k == 0:
            return 0.0, 2.0
        return 0.0, min(2.0, 2.0 * abs(self.bias) * self.decay**k)

    def spec(self) -> dict:
        return {
            "kernel": "graph_walk",
            "params": {
                "edges": [list(e) for e in self.edges],
                "size": self.size,
                "bias": repr(self.bias),
                "decay": repr(self.decay),
            },
        }


def make_graph_walk_kernel(edges, bias: float = 0.0, decay: float = 0.5, size: int | None = None, labels=None):
    edges = [(int(a), int(b)) for a, b in edges]
    if size is None:
        size = 1 + max(max(a, b) for a, b in edges)
    return GraphWalkKernel(edges, size, bias=bias, decay=decay, labels=labels)
