import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gchains import History, PastSpec, format_past, parse_past, parse_word
from gchains.intervals import Interval, ProbInterval

symbols = st.lists(st.integers(0, 2), max_size=6)
tails = st.lists(st.integers(0, 2), min_size=1, max_size=4)


def expand(p: PastSpec, n: int) -> list:
    return [p.lag(i) for i in range(n)]


@given(tails, symbols)
def test_canonical_form_preserves_sequence(tail, transient):
    p = PastSpec(tuple(tail), tuple(transient))
    raw = list(reversed(transient)) + [tail[len(tail) - 1 - (j % len(tail))] for j in range(40)]
    assert expand(p, 40) == raw[:40]


@given(tails, symbols, st.integers(1, 3))
def test_equal_sequences_compare_equal(tail, transient, reps):
    a = PastSpec(tuple(tail), tuple(transient))
    b = PastSpec(tuple(tail) * reps, tuple(tail) + tuple(transient))
    assert a == b
    assert hash(a) == hash(b)


@given(tails, symbols, st.integers(0, 10))
def test_recent_matches_lags(tail, transient, n):
    p = PastSpec(tuple(tail), tuple(transient))
    assert p.recent(n) == expand(p, n)
    assert p.suffix(n) == tuple(reversed(expand(p, n)))


@given(tails, symbols, symbols)
def test_extend_then_drop(tail, transient, word):
    p = PastSpec(tuple(tail), tuple(transient))
    assert p.extend(word).drop(len(word)) == p


@given(tails, symbols, symbols)
def test_history_agrees_with_pastspec(tail, transient, word):
    p = PastSpec(tuple(tail), tuple(transient))
    h = History(p)
    for a in word:
        h = h.push(a)
    q = p.extend(word)
    assert h.recent(12) == q.recent(12)
    assert h.to_past() == q
    assert h.run_length(0) == q.run_length(0)


def test_run_length():
    assert PastSpec((0,)).run_length(0) == float("inf")
    assert PastSpec((1,), (0, 0)).run_length(0) == 2
    assert PastSpec((0, 1)).run_length(1) == 1


@pytest.mark.parametrize("text", ["0^inf", "0^inf 11", "(01)^inf", "(01)^inf 100", "1^inf 0"])
def test_past_roundtrip(text):
    assert format_past(parse_past(text)) == text


def test_labelled_parse():
    labels = ["-1", "1"]
    p = parse_past("-1^inf 1,-1", labels)
    assert p == PastSpec((0,), (1, 0))
    assert format_past(p, labels) == "-1^inf 1,-1"
    assert parse_word("j>=1", ["0", "j>=1"]) == (1,)


@pytest.mark.parametrize("bad", ["011", "x^inf", "^inf"])
def test_parse_errors(bad):
    with pytest.raises(ValueError):
        parse_past(bad)


def test_contains_substring():
    p = PastSpec((0, 1), (1, 1))
    assert p.contains_substring((1, 1))
    assert p.contains_substring((0, 1, 0))
    assert not p.contains_substring((0, 0))
    assert not PastSpec((0,)).contains_substring((1,))


@given(st.floats(0, 1), st.floats(0, 1))
def test_prob_interval_product(a, b):
    lo1, hi1 = sorted((a, b))
    i = ProbInterval(lo1, hi1)
    j = i * i
    assert j.lo <= lo1 * lo1 + 1e-15 and j.hi >= hi1 * hi1 - 1e-15


@given(*(st.floats(-5, 5) for _ in range(4)))
def test_interval_arithmetic_encloses(a, b, c, d):
    x = Interval(*sorted((a, b)))
    y = Interval(*sorted((c, d)))
    for u, v in itertools.product((x.lo, x.hi, x.mid), (y.lo, y.hi, y.mid)):
        assert (x - y).contains(u - v, 1e-9)
        assert (x + y).contains(u + v, 1e-9)
        assert x.square().contains(u * u, 1e-9)
        assert x.abs().contains(abs(u), 1e-9)
