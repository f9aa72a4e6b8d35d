import itertools

import pytest

from gchains import PastSpec
from gchains.models import (
    ConstantQ,
    Geometric,
    HarmonicQ,
    make_autoregressive_kernel,
    make_graph_walk_kernel,
    make_markov_kernel,
    make_poisson_kernel,
    make_renewal_kernel,
    make_sparse_chain_kernel,
)


def markov2():
    return make_markov_kernel(1, [[0.9, 0.1], [0.3, 0.7]])


def ar(eps):
    return make_autoregressive_kernel(Geometric(0.5, 0.5, start=1), eps)


def binary_kernels():
    """Built-in kernels on a two-letter alphabet, keyed by a short name."""
    return {
        "sparse": make_sparse_chain_kernel(),
        "ar_minus": ar(-1),
        "ar_plus": ar(1),
        "markov": markov2(),
        "markov_order2": make_markov_kernel(2, [[0.5, 0.5], [0.2, 0.8], [0.6, 0.4], [0.1, 0.9]]),
        "renewal_half": make_renewal_kernel(ConstantQ(0.5)),
        "renewal_harmonic": make_renewal_kernel(HarmonicQ(1.0, 2.0)),
    }


def all_kernels():
    out = binary_kernels()
    out["graph_walk"] = make_graph_walk_kernel([(0, 1), (1, 2), (2, 0), (2, 1), (1, 1)], bias=0.8, decay=0.5)
    out["poisson"] = make_poisson_kernel(Geometric(0.3, 0.5, start=0), 1.0)
    return out


def short_pasts(size=2, max_period=2, max_transient=3):
    """Every eventually periodic past with short tail and transient."""
    seen = set()
    for p in range(1, max_period + 1):
        for tail in itertools.product(range(size), repeat=p):
            for t in range(max_transient + 1):
                for tr in itertools.product(range(size), repeat=t):
                    ps = PastSpec(tail, tr)
                    if ps not in seen:
                        seen.add(ps)
                        yield ps


@pytest.fixture(params=sorted(binary_kernels()))
def binary_kernel(request):
    return binary_kernels()[request.param]


@pytest.fixture(params=sorted(all_kernels()))
def any_kernel(request):
    return all_kernels()[request.param]


# acceptance criteria report one line each at the end of the run
ACCEPTANCE: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
