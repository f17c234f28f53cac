import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st
from scipy import integrate
from scipy.stats import norm

from barrier_mc.errors import DomainError
from barrier_mc.oracles import (BridgeEndpoints, ballot_survival, bridge_marginal,
                                bridge_max_tail, segment_crossing_prob)


def hitting_integral(x0, y, t, level=0.0):
    """P(bridge x0 -> y reaches level) from the first passage density of a
    free motion, integrated numerically; independent of the reflection formula."""
    a = level - x0

    def integrand(tau):
        first = abs(a) / math.sqrt(2 * math.pi * tau**3) * math.exp(-a * a / (2 * tau))
        return first * norm.pdf(y, level, math.sqrt(t - tau))

    val, _ = integrate.quad(integrand, 0, t, limit=200, epsabs=1e-14)
    return val / norm.pdf(y, x0, math.sqrt(t))


def test_ballot_reference_value():
    assert ballot_survival(BridgeEndpoints(-1, -1, 2)) == pytest.approx(1 - math.exp(-1), abs=1e-15)


def test_ballot_positive_endpoint_is_zero():
    assert ballot_survival(BridgeEndpoints(0.5, -1, 2)) == 0.0
    assert ballot_survival(BridgeEndpoints(-1, 1e-9, 2)) == 0.0


def test_ballot_zero_endpoint():
    assert ballot_survival(BridgeEndpoints(0.0, -3.0, 1.0)) == 0.0


@pytest.mark.parametrize("x0,y,t", [(-1, -1, 2), (-0.3, -2, 5), (-2, -0.1, 0.7), (-4, -4, 40)])
def test_ballot_against_first_passage_integral(x0, y, t):
    want = 1 - hitting_integral(x0, y, t)
    assert ballot_survival(BridgeEndpoints(x0, y, t)) == pytest.approx(want, abs=1e-8)


neg = st.floats(-20, 0, allow_nan=False)
pos_t = st.floats(1e-3, 1e4, allow_nan=False)


@given(neg, neg, pos_t)
def test_ballot_in_unit_interval_and_symmetric(x, y, t):
    p = ballot_survival(BridgeEndpoints(x, y, t))
    assert 0.0 <= p <= 1.0
    assert p == ballot_survival(BridgeEndpoints(y, x, t))


@given(neg, neg, pos_t, st.floats(1.01, 10))
def test_ballot_decreases_with_t(x, y, t, k):
    assert ballot_survival(BridgeEndpoints(x, y, t * k)) <= ballot_survival(BridgeEndpoints(x, y, t))


def test_bridge_max_tail_reference():
    assert bridge_max_tail(1.0, 2.0) == pytest.approx(math.exp(-1), abs=1e-16)
    assert bridge_max_tail(0.0, 3.0) == 1.0
    assert bridge_max_tail(1e3, 1e-3) == 0.0


@pytest.mark.parametrize("z,s", [(0.5, 1.0), (1.0, 2.0), (2.0, 7.0)])
def test_bridge_max_tail_against_integral(z, s):
    assert bridge_max_tail(z, s) == pytest.approx(hitting_integral(0.0, 0.0, s, z), rel=1e-7)


def test_bridge_max_tail_domain():
    with pytest.raises(DomainError):
        bridge_max_tail(-0.1, 1.0)
    with pytest.raises(DomainError):
        bridge_max_tail(1.0, 0.0)


def test_segment_crossing_flat_matches_max_tail():
    assert segment_crossing_prob(0.0, 0.0, 1.0, 1.0, 2.0) == bridge_max_tail(1.0, 2.0)


def test_segment_crossing_shift_invariance():
    # subtracting the line turns the linear barrier into a flat one
    p = segment_crossing_prob(0.0, 1.0, 2.0, 4.0, 3.0)
    assert p == pytest.approx(hitting_integral(-2.0, -3.0, 3.0), rel=1e-7)


def test_segment_crossing_start_on_barrier():
    assert segment_crossing_prob(1.0, 0.0, 1.0, 2.0, 1.0) == 1.0
    assert segment_crossing_prob(0.0, 3.0, 1.0, 2.0, 1.0) == 1.0


def test_segment_crossing_underflow_is_zero():
    assert segment_crossing_prob(-100, -100, 100, 100, 1e-3) == 0.0


def test_segment_crossing_domain():
    with pytest.raises(DomainError):
        segment_crossing_prob(0, 0, 1, 1, 0.0)


def test_bridge_marginal_values():
    assert bridge_marginal(BridgeEndpoints(0, 0, 4), 2) == (0.0, 1.0)
    mean, var = bridge_marginal(BridgeEndpoints(1, 3, 4), 1)
    assert mean == pytest.approx(1.5) and var == pytest.approx(0.75)


@pytest.mark.parametrize("r", [0.0, 4.0, -1.0, 5.0])
def test_bridge_marginal_domain(r):
    with pytest.raises(DomainError):
        bridge_marginal(BridgeEndpoints(0, 0, 4), r)


def test_endpoints_need_positive_length():
    with pytest.raises(DomainError):
        BridgeEndpoints(0, 0, 0)


@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(0.1, 10), st.floats(0.01, 0.99))
def test_bridge_marginal_variance_formula(x, y, t, frac):
    r = frac * t
    assume(0 < r < t)
    mean, var = bridge_marginal(BridgeEndpoints(x, y, t), r)
    assert var == pytest.approx(r * (t - r) / t)
    assert min(x, y) - 1e-12 <= mean <= max(x, y) + 1e-12
