"""Independent reference computations used by the test-suite.

Nothing here goes through the propagation, collapsing or interval code in
the package; each oracle works from the defining formula on plain floats.
"""

import itertools
import math

import numpy as np

from gchains import PastSpec, eval_kernel


def brute_iterated(kernel, past: PastSpec, word, n: int, tol=1e-12):
    """``g_n(past, word)`` by summing over every free prefix of length
    ``n - 1``; returns ``(lo, hi)``."""
    size = kernel.alphabet.size
    lo = hi = 0.0
    for u in itertools.product(range(size), repeat=n - 1):
        plo = phi = 1.0
        seq = tuple(u) + tuple(word)
        for i, a in enumerate(seq):
            p = eval_kernel(kernel, past.extend(seq[:i]), a, tol)
            plo *= p.lo
            phi *= p.hi
            if phi == 0.0:
                break
        lo += plo
        hi += phi
    return lo, hi


def sparse_prob_zero(past: PastSpec, depth: int = 200) -> float:
    """Sparse-chain ``g(x 0)`` straight from the verbal definition."""
    x = past.recent(depth)  # newest first
    if all(s == 0 for s in x):
        return 0.0
    run = next(i for i, s in enumerate(x) if s != 0)
    if run == 0 and x[1] == 0:  # ...01
        return 0.0
    if run in (1, 3):  # ...10 and ...1000
        return 0.0
    m = 0.0
    for j in range(depth - 1):
        ones = sum(x[: j + 1])
        m += 2.0 ** -(j + 1) * (1 / 3 if ones >= (j + 1) / 2 else 2 / 3)
    if run >= 4:
        m /= math.sqrt(run - 1)
    return m


def ar_prob(past: PastSpec, a: int, eps: int, scale=0.5, ratio=0.5, depth=200) -> float:
    """Autoregressive ``g(x a)`` with geometric alphas ``scale * ratio**i``,
    ``i >= 1``; symbol index 0 is -1 and index 1 is +1."""
    sign = (-1, 1)
    x = past.recent(depth)
    s = sum(scale * ratio ** (i + 1) * sign[b] for i, b in enumerate(x))
    return 0.5 + eps * sign[a] * s


def markov_power_tv(P, x0, y0, n):
    """TV between the laws of the chain ``n + 1`` steps after ``x0`` and ``y0``."""
    Q = np.linalg.matrix_power(np.asarray(P, dtype=float), n + 1)
    return 0.5 * float(np.abs(Q[x0] - Q[y0]).sum())


def naive_bool_product(a, b):
    a, b = np.asarray(a, dtype=bool), np.asarray(b, dtype=bool)
    n = a.shape[0]
    out = np.zeros((n, b.shape[1]), dtype=bool)
    for i in range(n):
        for j in range(b.shape[1]):
            out[i, j] = any(a[i, k] and b[k, j] for k in range(a.shape[1]))
    return out
