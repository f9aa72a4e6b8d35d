import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ar, binary_kernels, markov2
from gchains import PastSpec
from gchains.errors import IncompatibleSupports
from gchains.models import ConstantQ, HarmonicQ, make_markov_kernel, make_renewal_kernel, make_sparse_chain_kernel
from gchains.rng import uniforms
from gchains.simulation import (
    MonteCarloTV,
    SimConfig,
    acs_dk_series,
    empirical_cylinder_distribution,
    hitting_decomposition_check,
    hitting_time,
    simulate_path,
    simulate_paths,
    tv_window,
)
from oracles import markov_power_tv, sparse_prob_zero


def test_uniforms_range_and_counter_property():
    u = uniforms(7, 0, np.arange(50), np.arange(200))
    assert u.shape == (50, 200)
    assert (u >= 0).all() and (u < 1).all()
    # a replica's stream does not depend on how many replicas are drawn
    assert (uniforms(7, 0, [13], np.arange(200))[0] == u[13]).all()
    assert abs(u.mean() - 0.5) < 0.01
    assert not (uniforms(8, 0, [0], np.arange(200))[0] == u[0]).all()
    assert not (uniforms(7, 1, [0], np.arange(200))[0] == u[0]).all()


@pytest.mark.parametrize("name", sorted(binary_kernels()))
def test_paths_are_deterministic(name):
    k = binary_kernels()[name]
    past = PastSpec((1,), (0,))
    a = simulate_path(k, past, 300, seed=42)
    b = simulate_path(k, past, 300, seed=42)
    assert a.symbols == b.symbols
    batch = simulate_paths(k, past, 300, SimConfig(seed=42, replicas=3))
    assert batch[0].symbols == a.symbols


def test_burn_in_is_a_suffix():
    k = markov2()
    full = simulate_path(k, PastSpec((0,)), 120, seed=3)
    tail = simulate_path(k, PastSpec((0,)), 100, seed=3, burn_in=20)
    assert tail.symbols == full.symbols[20:]


@pytest.mark.parametrize("name", sorted(binary_kernels()))
def test_paths_avoid_declared_zeros(name):
    k = binary_kernels()[name]
    for past in (PastSpec((1,)), PastSpec((0,), (1,)), PastSpec((0, 1))):
        for path in simulate_paths(k, past, 200, SimConfig(seed=5, replicas=5)):
            x = past
            for a in path.symbols:
                assert not k.zeros.forbids(x, a), (past, a)
                x = x.extend((a,))
            assert path.defect < 1e-9


def test_sparse_empirical_transition_frequency():
    k = make_sparse_chain_kernel()
    past = PastSpec((1,))
    # after ...11 the chance of a 0 is m(1^inf)
    want = sparse_prob_zero(past)
    paths = simulate_paths(k, past, 1, SimConfig(seed=1, replicas=20000))
    got = sum(p.symbols[0] == 0 for p in paths) / 20000
    assert abs(got - want) < 4 * math.sqrt(want * (1 - want) / 20000)


def test_markov_stationary_frequencies():
    dist = empirical_cylinder_distribution(markov2(), PastSpec((0,)), 1, SimConfig(seed=0, horizon=100000))
    assert dist[(0,)] == pytest.approx(0.75, abs=0.01)


def test_hitting_time_geometric():
    k = markov2()
    # from 0, T counts steps until a 1: geometric with mean 10
    rep = hitting_time(k, PastSpec((0,)), [(1,)], 1, 10**4, SimConfig(seed=2, replicas=20000))
    assert rep.timeout_fraction == 0.0
    assert abs(rep.empirical_mean - 10.0) < 4 * rep.standard_error


def test_hitting_time_counts_past_symbols():
    k = make_renewal_kernel(ConstantQ(0.5))
    all_words = [(0, 0), (0, 1), (1, 0), (1, 1)]
    # the window at m = 1 already holds one past symbol, so A^K is hit at once
    rep = hitting_time(k, PastSpec((1,)), all_words, 2, 100, SimConfig(seed=0, replicas=100))
    assert set(rep.hits) == {1}
    # from ...00 with target {11} at least two new ones are needed
    rep = hitting_time(k, PastSpec((0,)), [(1, 1)], 2, 10**4, SimConfig(seed=0, replicas=500))
    assert min(rep.hits) == 2


def test_decomposition_exact_markov():
    rep = hitting_decomposition_check(markov2(), PastSpec((0,)), [(1,)], 1, 50, SimConfig(seed=0, replicas=10))
    assert rep.passed and rep.residual_kind == "exact"
    assert rep.total_mass.contains(1.0, 1e-12)


def test_tv_exact_markov():
    P = [[0.9, 0.1], [0.3, 0.7]]
    for n in range(0, 8):
        r = tv_window(markov2(), PastSpec((0,)), PastSpec((1,)), n, 1)
        assert r.value.contains(markov_power_tv(P, 0, 1, n), 1e-12)
        assert r.value.mid == pytest.approx(0.6 ** (n + 1), abs=1e-12)


def test_tv_window_is_monotone_in_length():
    k = ar(-1)
    x, y = PastSpec((0,)), PastSpec((1,))
    vals = [tv_window(k, x, y, 2, m).value.mid for m in (1, 2, 3)]
    assert vals[0] <= vals[1] + 1e-12 <= vals[2] + 2e-12


def test_tv_monte_carlo_is_reproducible():
    mc = MonteCarloTV(SimConfig(seed=9, replicas=2000))
    a = tv_window(markov2(), PastSpec((0,)), PastSpec((1,)), 1, 2, mc)
    b = tv_window(markov2(), PastSpec((0,)), PastSpec((1,)), 1, 2, mc)
    assert a.value == b.value and a.standard_error > 0


@pytest.mark.parametrize("order", [1, 2, 3])
def test_markov_dk_vanishes(order):
    rng = np.random.default_rng(order)
    rows = rng.dirichlet(np.ones(2), size=2**order) * 0.98 + 0.01
    k = make_markov_kernel(order, rows.tolist())
    s = acs_dk_series(k, PastSpec((0,)), PastSpec((1,), (0, 1)), horizon=10, config=SimConfig(seed=1, replicas=20))
    assert (s.dk[:, s.ks >= order] == 0.0).all()


def test_dk_doubles_window_on_support_clash():
    k = make_sparse_chain_kernel()
    # from ...11 a 0 may follow, from ...0001 (=...01) it may not
    s = acs_dk_series(k, PastSpec((1,)), PastSpec((0,), (1,)), horizon=8, config=SimConfig(seed=0, replicas=20))
    assert s.n_offset >= 1
    assert s.dk.shape == (20, 7)
    assert np.isfinite(s.dk).all()


def test_dk_incompatible_supports(monkeypatch):
    # from 0^inf a 1 is forbidden; paths from ...01 that stay at 0 past the
    # window start clash as soon as they emit a 1
    import gchains.simulation as sim
    monkeypatch.setattr(sim, "MAX_WINDOW", 4)
    k = make_renewal_kernel(HarmonicQ(1.0, 2.0))
    with pytest.raises(IncompatibleSupports):
        acs_dk_series(k, PastSpec((0,), (1,)), PastSpec((0,)), horizon=40, config=SimConfig(seed=0, replicas=50))


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**63 - 1))
def test_csv_and_json_exports(seed):
    s = acs_dk_series(markov2(), PastSpec((0,)), PastSpec((1,)), horizon=5, config=SimConfig(seed=seed, replicas=3))
    assert s.to_csv().splitlines()[0].startswith("k,")
    assert s.to_json()["verdict"] in ("summable_evidence", "diverging_evidence", "inconclusive")


def test_decomposition_monte_carlo_residual():
    # non-collapsible states outgrow the budget, so the tail mass is simulated
    k = ar(-1)
    rep = hitting_decomposition_check(k, PastSpec((0,)), [(1, 1)], 2, 200, SimConfig(seed=3, replicas=20000),
                                      tol=1e-3, budget=500)
    assert rep.residual_kind == "monte_carlo"
    assert rep.exact_steps < 200
    assert rep.passed, rep.total_mass
