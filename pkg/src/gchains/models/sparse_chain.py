"""Binary sparse chain whose variation rate is not square summable.

Forbidden transitions: ``01 -> 0``, ``10 -> 0``, ``1000 -> 0`` and the
all-zero past ``...000 -> 0``.  Elsewhere the probability of a 0 is the
mixture

    m(x) = sum_{j >= 0} 2**-(j+1) * p_j(0 | x_{-j}^0),

where ``p_j(0 | .)`` is 1/3 when at least half of the last ``j + 1``
symbols are ones and 2/3 otherwise.  After ``11`` and after ``100`` the
probability of a 0 is ``m(x)``; after a 1 followed by a run of ``k + 1 >= 4``
zeros it is ``m(x) / sqrt(k)``.  The remaining mass goes to 1.
"""

from __future__ import annotations

import math

from ..intervals import ProbInterval
from ..kernel import Alphabet, Kernel, Row
from ..words import History, PastSpec
from ..zeros import ZeroDeclaration

SPARSE_ZEROS = ZeroDeclaration(
    cylinder_zeros=(((0, 1), 0), ((1, 0), 0), ((1, 0, 0, 0), 0)),
    isolated_zeros=((PastSpec((0,)), 0),),
    complete=True,
)


class SparseChainKernel(Kernel):
    tag = "sparse_chain"
    alphabet = Alphabet.finite(2)
    labels = ["0", "1"]
    zeros = SPARSE_ZEROS

    def state_init(self, past: PastSpec):
        return History(past)

    def state_update(self, state, symbol: int):
        return state.push(symbol)

    @staticmethod
    def mixture(state, tol: float) -> ProbInterval:
        """Enclosure of ``m(x)``; the omitted weights ``j > L`` carry
        ``p_j(0) in [1/3, 2/3]``."""
        cut = max(1, math.ceil(math.log2(1.0 / (3.0 * tol)))) if tol < 1 / 6 else 1
        s = 0.0
        ones = 0
        weight = 0.5
        for j, b in enumerate(state.recent(cut)):
            ones += b
            s += weight * (1.0 if 2 * ones < j + 1 else 0.5)
            weight *= 0.5
        # s accumulated 2/3 and 1/3 as 1 and 1/2; rescale by 2/3
        s *= 2.0 / 3.0
        rem = 2.0 * weight  # sum_{j >= cut} 2^-(j+1)
        return ProbInterval(s + rem / 3.0, s + 2.0 * rem / 3.0)

    def prob_zero(self, state, tol: float) -> ProbInterval:
        r = state.run_length(0)
        if r == math.inf:
            return ProbInterval.point(0.0)
        if r == 0:
            if state.lag(1) == 0:
                return ProbInterval.point(0.0)
            return self.mixture(state, tol)
        if r in (1, 3):
            return ProbInterval.point(0.0)
        m = self.mixture(state, tol)
        if r == 2:
            return m
        f = 1.0 / math.sqrt(r - 1)
        return ProbInterval(m.lo * f, m.hi * f)

    def row(self, state, tol: float = 1e-12) -> Row:
        p0 = self.prob_zero(state, tol)
        return Row((0, 1), (p0, ProbInterval(1.0 - p0.hi, 1.0 - p0.lo)))

    def eval(self, state, symbol: int, tol: float = 1e-12) -> ProbInterval:
        return self.row(state, tol).probs[symbol]

    def variation_bounds(self, k: int) -> tuple[float, float]:
        if k <= 4:
            return 0.0, 2.0
        # pasts sharing k zeros may differ in run length (>= k): 1/sqrt(k-1) factor;
        # otherwise the mixtures differ only through j >= k.
        run = 1.0 / math.sqrt(k - 1)
        return (2.0 / 3.0) * run, max((4.0 / 3.0) * run, (2.0 / 3.0) * 2.0**-k)

    def spec(self) -> dict:
        return {"kernel": "sparse_chain", "params": {}}


def make_sparse_chain_kernel() -> SparseChainKernel:
    return SparseChainKernel()
