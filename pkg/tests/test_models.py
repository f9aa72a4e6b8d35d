import json
import math
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import all_kernels
from gchains import PastSpec, eval_kernel
from gchains.errors import BadBetas, BadQ, BadRow, BadTotal, SinkVertex, SpecError
from gchains.models import (
    ConstantQ,
    Explicit,
    Geometric,
    HarmonicQ,
    PowerLaw,
    RationalQ,
    classify_renewal,
    kernel_from_spec,
    load_kernel,
    make_autoregressive_kernel,
    make_graph_walk_kernel,
    make_markov_kernel,
    make_poisson_kernel,
    make_renewal_kernel,
)

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


@pytest.mark.parametrize("name", sorted(all_kernels()))
def test_spec_roundtrip(name):
    k = all_kernels()[name]
    k2 = kernel_from_spec(json.loads(json.dumps(k.spec())))
    assert k2.spec() == k.spec()
    for past in (PastSpec((1,)), PastSpec((0,), (1, 0)), PastSpec((1, 0), (0,))):
        for a in (0, 1):
            assert eval_kernel(k, past, a).mid == pytest.approx(eval_kernel(k2, past, a).mid, abs=1e-12)


@pytest.mark.parametrize("path", sorted(CONFIGS.glob("*.json")), ids=lambda p: p.stem)
def test_shipped_configs_load(path):
    assert load_kernel(path).tag


@pytest.mark.parametrize("doc", [
    {},
    {"kernel": "nope"},
    {"kernel": "markov", "params": {"order": 1}},
    {"kernel": "markov", "params": {"order": 1, "rows": [["0.5", "0.6"], ["1", "0"]]}},
    {"kernel": "markov", "params": {"order": 1, "rows": [["x", "1"], ["1", "0"]]}},
    {"kernel": "renewal", "params": {"q": {"kind": "constant", "params": {"c": "1.5"}}}},
    {"kernel": "renewal", "params": {"q": {"kind": "weird"}}},
])
def test_bad_specs(doc):
    with pytest.raises(SpecError):
        kernel_from_spec(doc)


def test_markov_errors():
    with pytest.raises(BadRow):
        make_markov_kernel(1, [[0.5, 0.4], [0.5, 0.5]])
    with pytest.raises(BadRow):
        make_markov_kernel(2, [[0.5, 0.5], [0.5, 0.5]])


def test_graph_walk_needs_out_edges():
    with pytest.raises(SinkVertex):
        make_graph_walk_kernel([(0, 1)], size=2)


def test_autoregressive_total():
    with pytest.raises(BadTotal):
        make_autoregressive_kernel(Geometric(1.0, 0.5, start=1), -1)


def test_autoregressive_isolated_zeros():
    minus = make_autoregressive_kernel(Geometric(0.5, 0.5, start=1), -1)
    plus = make_autoregressive_kernel(Geometric(0.5, 0.5, start=1), 1)
    # epsilon = -1: the constant past c^inf forbids repeating c
    assert set(minus.zeros.isolated_zeros) == {(PastSpec((0,)), 0), (PastSpec((1,)), 1)}
    assert set(plus.zeros.isolated_zeros) == {(PastSpec((0,)), 1), (PastSpec((1,)), 0)}
    assert eval_kernel(minus, PastSpec((1,)), 1).hi == 0.0
    assert eval_kernel(minus, PastSpec((1,), (0,)), 1).lo > 0.0


def test_poisson_without_memory():
    k = make_poisson_kernel(Geometric(0.0, 0.5), 1.0)
    assert eval_kernel(k, PastSpec((0,)), 2).mid == pytest.approx(math.exp(-1) / 2, abs=1e-14)
    assert eval_kernel(k, PastSpec((0,), (3,)), 0).mid == 1.0
    assert eval_kernel(k, PastSpec((0,), (3,)), 1).hi == 0.0


def test_poisson_rate_follows_past():
    k = make_poisson_kernel(Geometric(0.3, 0.5), 1.0)
    # past ...0 0 0 with a 1 two steps back: v = exp(-(0.3*0.25*1))
    past = PastSpec((0,), (1, 0, 0))
    v = math.exp(-0.3 * 0.25)
    for a in range(5):
        want = math.exp(-v) * v**a / math.factorial(a)
        assert eval_kernel(k, past, a).contains(want, 1e-12)


def test_poisson_errors():
    with pytest.raises(BadBetas):
        make_poisson_kernel(Geometric(0.3, 0.5, start=1), 1.0)
    with pytest.raises(BadBetas):
        make_poisson_kernel(Geometric(0.3, 0.5), 0.0)


@given(st.floats(0.01, 2), st.floats(0.05, 0.95), st.integers(0, 60))
def test_geometric_tail_bounds(scale, ratio, k):
    c = Geometric(scale, ratio)
    direct = math.fsum(abs(c(i)) for i in range(k + 1, k + 2000))
    assert c.tail(k) >= direct - 1e-12


@pytest.mark.parametrize("coef", [PowerLaw(1.0, 2.0, start=1), Explicit((0.1, 0.2, 0.05))])
def test_tail_bounds_dominate(coef):
    for k in range(0, 10):
        direct = math.fsum(abs(coef(i)) for i in range(k + 1, 20000))
        assert coef.tail(k) >= direct - 1e-9
        assert coef.tail(coef.cutoff(1e-3)) <= 1e-3


def test_renewal_kernel_and_zero():
    k = make_renewal_kernel(HarmonicQ(1.0, 2.0))
    assert eval_kernel(k, PastSpec((0,)), 1).hi == 0.0
    assert eval_kernel(k, PastSpec((0,), (1, 0, 0)), 1).mid == pytest.approx(1 / 4)
    assert k.zeros.isolated_zeros == ((PastSpec((0,)), 1),)
    with pytest.raises(BadQ):
        make_renewal_kernel(ConstantQ(0.0))


@pytest.mark.parametrize("q, case", [
    (ConstantQ(0.5), "UniqueRenewal_2b"),
    (HarmonicQ(1.0, 2.0), "UniqueTrivial_1a"),
    (HarmonicQ(2.0, 3.0), "PhaseTransition_1b"),
    (HarmonicQ(0.9, 2.0, offset=0.1), "UniqueRenewal_2b"),
    (HarmonicQ(1.0, 2.0, q_inf=0.3), "NoStationary_2a"),
    (RationalQ((1.0,), (1.0, 0.0, 2.0)), "UniqueTrivial_1a"),
    (RationalQ((3.0,), (1.0, 4.0)), "PhaseTransition_1b"),
])
def test_renewal_table(q, case):
    assert classify_renewal(q, terms=10**4).case == case


def test_positive_liminf_always_convergent():
    for c in (0.01, 0.2, 0.7):
        assert HarmonicQ(0.5, 3.0, offset=c).series_certificate()[0] == "convergent"
        assert ConstantQ(c).series_certificate()[0] == "convergent"


def test_partial_sum_tracks_closed_form():
    # constant q: sum_{n >= 0} (1 - c)^(n+1) = (1 - c) / c
    r = classify_renewal(ConstantQ(0.25), terms=10**4)
    assert r.partial_sum == pytest.approx(3.0, rel=1e-10)
