"""Symbolic layer: canonical forms, shift algebra, cylinders, metrics."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bouquet.shift import (DEFAULT_STATE_CAP, Itinerary, StateCapError, ZERO,
                           alphabet, cylinder_count, cylinder_index,
                           cylinders, first_difference, natural_metric,
                           parse_itinerary, prepend, representative, shift)

symbols = st.integers(min_value=-3, max_value=3)
words = st.lists(symbols, min_size=0, max_size=6).map(tuple)
periods = st.lists(symbols, min_size=1, max_size=4).map(tuple)
itineraries = st.builds(Itinerary, words, periods)


# --- canonical form -------------------------------------------------------

def test_period_reduced_to_primitive_root():
    assert Itinerary((), (1, 2, 1, 2)).period == (1, 2)
    assert Itinerary((), (0, 0, 0)).period == (0,)


def test_trailing_preperiod_absorbed_by_rotation():
    # 2,(1,2)* reads 2,1,2,1,2,... = (2,1)*
    assert Itinerary((2,), (1, 2)) == Itinerary((), (2, 1))
    # 0,0,(0)* = (0)*
    assert Itinerary((0, 0), (0,)) == ZERO


@given(itineraries)
def test_canonical_form_idempotent(s):
    assert Itinerary(s.preperiod, s.period) == s


@given(itineraries)
def test_str_parse_round_trip(s):
    assert parse_itinerary(str(s)) == s


@given(itineraries, st.integers(min_value=0, max_value=12))
def test_indexing_matches_eventual_period(s, i):
    pre, per = s.preperiod, s.period
    expected = pre[i] if i < len(pre) else per[(i - len(pre)) % len(per)]
    assert s[i] == expected


# --- shift and prepend ----------------------------------------------------

@given(itineraries, words)
def test_shift_undoes_prepend(s, u):
    t = prepend(u, s)
    for _ in range(len(u)):
        t = shift(t)
    assert t == s


@given(itineraries)
def test_shift_drops_first_symbol(s):
    t = shift(s)
    for i in range(10):
        assert t[i] == s[i + 1]


def test_shift_of_periodic_rotates():
    assert shift(Itinerary((), (1, 2))) == Itinerary((), (2, 1))


# --- first difference and metrics -----------------------------------------

@given(itineraries, itineraries)
def test_first_difference_symmetric(s, t):
    assert first_difference(s, t) == first_difference(t, s)


@given(itineraries, itineraries)
def test_first_difference_none_iff_equal(s, t):
    d = first_difference(s, t)
    if d is None:
        assert s == t
    else:
        assert s[d] != t[d]
        for i in range(d):
            assert s[i] == t[i]


@given(itineraries, itineraries, words)
def test_natural_metric_prepend_homogeneous_exact(s, t, u):
    # theta = 0.5 so the powers are exact binary floats
    d = natural_metric(s, t, 0.5)
    assert natural_metric(prepend(u, s), prepend(u, t), 0.5) == 0.5 ** len(u) * d


@given(itineraries, itineraries, itineraries)
@settings(max_examples=50)
def test_natural_metric_ultrametric(s, t, u):
    dst = natural_metric(s, t, 0.5)
    assert dst <= max(natural_metric(s, u, 0.5), natural_metric(u, t, 0.5))


# --- cylinders -------------------------------------------------------------

def test_alphabet_and_count():
    assert list(alphabet(2)) == [-2, -1, 0, 1, 2]
    assert cylinder_count(2, 3) == 125


@pytest.mark.parametrize("N,m", [(1, 1), (1, 3), (2, 2)])
def test_cylinders_lex_order_and_count(N, m):
    ws = list(cylinders(N, m))
    assert len(ws) == (2 * N + 1) ** m
    assert ws == sorted(ws)
    assert ws == list(itertools.product(range(-N, N + 1), repeat=m))


@pytest.mark.parametrize("N,m", [(1, 2), (2, 3)])
def test_cylinder_index_inverts_enumeration(N, m):
    for i, w in enumerate(cylinders(N, m)):
        assert cylinder_index(w, N) == i


def test_state_cap_enforced():
    with pytest.raises(StateCapError):
        list(cylinders(3, 4, state_cap=100))
    assert DEFAULT_STATE_CAP >= 10**6


def test_representative_appends_zero_tail():
    s = representative((1, -1))
    assert s == Itinerary((1, -1), (0,))
    assert s[0] == 1 and s[1] == -1 and s[5] == 0
