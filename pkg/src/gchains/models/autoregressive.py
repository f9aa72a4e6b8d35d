"""Linear autoregressive kernel on ``{-1, 1}``.

    g(x a) = 1/2 + epsilon * a * sum_{i >= 1} alpha_i x_{-i+1}

with positive ``alpha_i`` summing to 1/2.  Symbol index 0 is ``-1`` and
index 1 is ``+1``.
"""

from __future__ import annotations

import math

from ..errors import BadTotal, SpecError
from ..intervals import ProbInterval
from ..kernel import Alphabet, Kernel, Row
from ..words import History, PastSpec
from ..zeros import ZeroDeclaration
from .coefficients import Coefficients

SIGN = (-1, 1)


class AutoregressiveKernel(Kernel):
    tag = "autoregressive"
    alphabet = Alphabet.finite(2)
    labels = ["-1", "1"]

    def __init__(self, alphas: Coefficients, epsilon: int):
        if epsilon not in (-1, 1):
            raise SpecError("epsilon must be -1 or 1")
        if alphas.start != 1:
            raise SpecError("alpha coefficients are indexed from 1")
        self.alphas = alphas
        self.epsilon = epsilon
        if abs(alphas.total() - 0.5) > 1e-12:
            raise BadTotal(f"alphas sum to {alphas.total()!r}, expected 1/2")
        for i in range(1, 50):
            if not alphas(i) > 0:
                raise SpecError("alpha coefficients must be positive")
        # constant pasts: g(c^inf a) = 1/2 + epsilon * a * c / 2
        iso = []
        for c in (0, 1):
            for a in (0, 1):
                if 0.5 + epsilon * SIGN[a] * SIGN[c] * 0.5 == 0.0:
                    iso.append((PastSpec((c,)), a))
        self.zeros = ZeroDeclaration(isolated_zeros=iso, complete=True)

    def state_init(self, past: PastSpec):
        return History(past)

    def state_update(self, state, symbol: int):
        return state.push(symbol)

    def row(self, state, tol: float = 1e-12) -> Row:
        c = state.lag(0)
        if state.run_length(c) == math.inf:
            up = 0.5 + self.epsilon * SIGN[c] * 0.5
            return Row((0, 1), (ProbInterval.point(1.0 - up), ProbInterval.point(up)))
        cut = self.alphas.cutoff(tol / 2)
        s = 0.0
        for i, b in enumerate(state.recent(cut), start=1):
            s += self.alphas(i) * SIGN[b]
        t = self.alphas.tail(cut)
        up = 0.5 + self.epsilon * s
        p_up = ProbInterval(up - t, up + t)
        p_down = ProbInterval(1.0 - up - t, 1.0 - up + t)
        return Row((0, 1), (p_down, p_up))

    def eval(self, state, symbol: int, tol: float = 1e-12) -> ProbInterval:
        return self.row(state, tol).probs[symbol]

    def variation_bounds(self, k: int) -> tuple[float, float]:
        # attained by constant tails of opposite signs behind a shared block
        v = min(2.0, 4.0 * self.alphas.tail(k))
        return v, v

    def spec(self) -> dict:
        return {"kernel": "autoregressive", "params": {"alpha": self.alphas.spec(), "epsilon": self.epsilon}}


def make_autoregressive_kernel(alphas: Coefficients, epsilon: int) -> AutoregressiveKernel:
    return AutoregressiveKernel(alphas, epsilon)
