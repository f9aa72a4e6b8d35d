import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import all_kernels, ar, binary_kernels, markov2, short_pasts
from gchains import PastSpec, Sampled, eval_kernel, iterate_kernel, variation_rate, w2_term
from gchains.errors import BudgetExceeded, UnknownSymbol
from gchains.kernel import propagate
from gchains.models import make_sparse_chain_kernel
from oracles import ar_prob, brute_iterated, sparse_prob_zero

PASTS = list(short_pasts(max_transient=4))


@pytest.mark.parametrize("past", PASTS[:40], ids=str)
def test_rows_are_normalized(any_kernel, past):
    if any_kernel.tag == "graph_walk":
        past = PastSpec(tuple(min(s, 1) for s in past.tail), past.transient)
    row = any_kernel.row(any_kernel.state_init(past), 1e-12)
    lo = math.fsum(p.lo for p in row.probs)
    hi = math.fsum(p.hi for p in row.probs) + row.tail_mass
    assert lo <= 1 + 1e-9 and hi >= 1 - 1e-9
    for p in row.probs:
        assert 0.0 <= p.lo <= p.hi <= 1.0


@pytest.mark.parametrize("name", sorted(binary_kernels()))
def test_incremental_state_matches_fresh_state(name):
    k = binary_kernels()[name]
    rng = random.Random(1)
    for _ in range(50):
        past = rng.choice(PASTS)
        word = [rng.randrange(2) for _ in range(rng.randrange(1, 8))]
        s = k.state_init(past)
        for a in word:
            s = k.state_update(s, a)
        fresh = k.state_init(past.extend(word))
        for a in (0, 1):
            p, q = k.eval(s, a, 1e-12), k.eval(fresh, a, 1e-12)
            assert abs(p.mid - q.mid) <= 1e-12


@pytest.mark.parametrize("past", PASTS, ids=str)
def test_sparse_chain_against_definition(past):
    k = make_sparse_chain_kernel()
    p = eval_kernel(k, past, 0, 1e-12)
    assert p.contains(sparse_prob_zero(past), 1e-12)


@pytest.mark.parametrize("eps", [-1, 1])
@pytest.mark.parametrize("past", PASTS[:30], ids=str)
def test_autoregressive_against_definition(eps, past):
    k = ar(eps)
    for a in (0, 1):
        assert eval_kernel(k, past, a, 1e-12).contains(ar_prob(past, a, eps), 1e-12)


def test_declared_zeros_are_exact_zeros(any_kernel):
    for past in PASTS:
        if any_kernel.tag == "graph_walk" and max(past.tail + past.transient) > 2:
            continue
        for a in range(3 if any_kernel.tag in ("graph_walk", "poisson_infinite") else 2):
            if any_kernel.zeros.forbids(past, a):
                assert eval_kernel(any_kernel, past, a).hi == 0.0, (past, a)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(sorted(binary_kernels())), st.integers(0, len(PASTS) - 1),
       st.lists(st.integers(0, 1), min_size=1, max_size=2), st.integers(1, 4))
def test_iterated_kernel_brute_force(name, pi, word, n):
    k = binary_kernels()[name]
    past = PASTS[pi]
    got = iterate_kernel(k, past, word, n)
    lo, hi = brute_iterated(k, past, word, n)
    slack = got.width + (hi - lo) + 1e-10
    assert abs(got.mid - 0.5 * (lo + hi)) <= slack


def test_iterated_kernel_sums_to_one():
    k = make_sparse_chain_kernel()
    past = PastSpec((1,), (0, 0))
    total = sum(iterate_kernel(k, past, (a, b), 4).mid for a in (0, 1) for b in (0, 1))
    assert total == pytest.approx(1.0, abs=1e-9)


def test_markov_iterated_kernel_is_matrix_power():
    k = markov2()
    # P^3[0, 1]
    import numpy as np
    P = np.array([[0.9, 0.1], [0.3, 0.7]])
    assert iterate_kernel(k, PastSpec((0,)), (1,), 3).mid == pytest.approx(np.linalg.matrix_power(P, 3)[0, 1], abs=1e-14)


def test_budget_and_symbol_errors():
    k = make_sparse_chain_kernel()
    with pytest.raises(BudgetExceeded):
        propagate(k, k.state_init(PastSpec((1,))), 14, 1e-12, budget=100)
    with pytest.raises(UnknownSymbol):
        eval_kernel(k, PastSpec((1,)), 2)
    with pytest.raises(ValueError):
        iterate_kernel(k, PastSpec((1,)), (), 1)


@pytest.mark.parametrize("name", sorted(all_kernels()))
def test_variation_bounds_are_monotone_and_cover_samples(name):
    k = all_kernels()[name]
    ups = [variation_rate(k, j).upper for j in range(8)]
    assert all(a >= b - 1e-15 for a, b in zip(ups, ups[1:]))
    if k.alphabet.is_finite:
        for j in (0, 1, 3, 6):
            s = variation_rate(k, j, Sampled(probes=100, seed=j))
            assert s.lower <= s.upper + 1e-9


def test_markov_variation_vanishes_beyond_order():
    k = binary_kernels()["markov_order2"]
    assert variation_rate(k, 2).upper == 0.0
    assert variation_rate(k, 1).upper > 0.0


@settings(max_examples=40, deadline=None)
@given(st.integers(0, len(PASTS) - 1), st.integers(0, len(PASTS) - 1),
       st.lists(st.integers(0, 1), min_size=1, max_size=5), st.booleans())
def test_w2_term_symmetric_and_nonnegative(i, j, w, use_sqrt):
    k = make_sparse_chain_kernel()
    a = w2_term(k, PASTS[i], PASTS[j], w, use_sqrt)
    b = w2_term(k, PASTS[j], PASTS[i], w, use_sqrt)
    assert a.lo >= -1e-15
    assert abs(a.mid - b.mid) <= a.width + b.width + 1e-12


def test_w2_term_zero_for_same_past():
    k = ar(-1)
    p = PastSpec((0, 1), (1,))
    assert w2_term(k, p, p, (1, 0)).hi <= 1e-12
