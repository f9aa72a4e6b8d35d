"""Kernel on the nonnegative integers with Poisson rows.

    v(x) = exp(-sum_{j >= 0} beta_j * min(x_{-j}, gamma))

After a 0 the next symbol is Poisson(v(x)); after any other symbol it is 0.
We use the normalized form ``exp(-v) v**a / a!``.
"""

from __future__ import annotations

import math

from scipy.stats import poisson

from ..errors import BadBetas
from ..intervals import ProbInterval
from ..kernel import Alphabet, Kernel, Row
from ..words import History, PastSpec
from ..zeros import CylinderRule, ZeroDeclaration
from .coefficients import Coefficients


def _nonzero_forbids_nonzero(ctx: tuple, a: int) -> bool:
    return ctx[0] != 0 and a != 0


POISSON_ZEROS = ZeroDeclaration(
    rules=(CylinderRule(1, _nonzero_forbids_nonzero, "after a != 0 only 0 may follow"),),
    complete=True,
)


def _pmf_range(a: int, v_lo: float, v_hi: float) -> ProbInterval:
    # v -> e^-v v^a / a! increases up to v = a and decreases after
    ends = poisson.pmf(a, [v_lo, v_hi])
    lo, hi = float(min(ends)), float(max(ends))
    if v_lo < a < v_hi:
        hi = float(poisson.pmf(a, a))
    return ProbInterval(lo, hi)


class PoissonKernel(Kernel):
    tag = "poisson_infinite"
    zeros = POISSON_ZEROS

    def __init__(self, betas: Coefficients, gamma: float, truncation_mass: float = 1e-12):
        if betas.start != 0:
            raise BadBetas("beta coefficients are indexed from 0")
        total = betas.abs_total()
        if not math.isfinite(total):
            raise BadBetas("betas must be absolutely summable")
        if not gamma > 0:
            raise BadBetas("gamma must be positive")
        self.betas = betas
        self.gamma = float(gamma)
        self.alphabet = Alphabet.countable(truncation_mass)
        self.v_max = math.exp(self.gamma * total)

    def state_init(self, past: PastSpec):
        return History(past)

    def state_update(self, state, symbol: int):
        return state.push(symbol)

    def v_interval(self, state, tol: float) -> tuple[float, float]:
        """Enclosure of ``v(x)``; the exponent is truncated where the
        remaining betas move ``v`` by less than ``tol / 4``."""
        if self.betas.abs_total() == 0.0:
            return 1.0, 1.0
        cut = self.betas.cutoff(tol / (4.0 * self.gamma * self.v_max))
        s = math.fsum(self.betas(j) * min(b, self.gamma) for j, b in enumerate(state.recent(cut + 1)))
        rem = self.gamma * self.betas.tail(cut)
        return math.exp(-(s + rem)), math.exp(-(s - rem))

    def row(self, state, tol: float = 1e-12) -> Row:
        if state.lag(0) != 0:
            return Row((0,), (ProbInterval.point(1.0),), 0.0)
        v_lo, v_hi = self.v_interval(state, tol)
        mass = self.alphabet.truncation_mass
        # P(N > n) is increasing in v, so v_hi bounds the omitted mass
        n = 0
        while poisson.sf(n, v_hi) > mass:
            n += 1
        syms = tuple(range(n + 1))
        probs = tuple(_pmf_range(a, v_lo, v_hi) for a in syms)
        return Row(syms, probs, float(poisson.sf(n, v_hi)))

    def eval(self, state, symbol: int, tol: float = 1e-12) -> ProbInterval:
        if state.lag(0) != 0:
            return ProbInterval.point(1.0 if symbol == 0 else 0.0)
        v_lo, v_hi = self.v_interval(state, tol)
        return _pmf_range(symbol, v_lo, v_hi)

    def variation_bounds(self, k: int) -> tuple[float, float]:
        # the exponents differ by at most gamma * sum_{j >= k} |beta_j| and
        # Poisson laws are 2-Lipschitz in the mean for the l1 distance
        if k == 0:
            return 0.0, 2.0
        return 0.0, min(2.0, 2.0 * self.gamma * self.v_max * self.betas.tail(k - 1))

    def finite_quotient(self):
        return (0, 1), ["0", "j>=1"]

    def spec(self) -> dict:
        return {"kernel": "poisson_infinite", "params": {"beta": self.betas.spec(), "gamma": repr(self.gamma)}}


def make_poisson_kernel(betas: Coefficients, gamma: float, truncation_mass: float = 1e-12) -> PoissonKernel:
    return PoissonKernel(betas, gamma, truncation_mass)
