import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from ldpcb.channel import (
    BEC,
    BIAWGN,
    BSC,
    DiscreteChannel,
    NumericControls,
    as_discrete,
    capacity,
    ebno_db_to_sigma,
    g_moment,
    g_moments,
    h2,
    h2_series,
    puncture_channel,
    quantize_biawgn,
    series_tail,
    series_weights,
    sigma_to_ebno_db,
    uncoded_error_prob,
)
from ldpcb.errors import NumericError, ValidationError

LN2 = math.log(2)


def _awgn_integral(f, sigma):
    # independent oracle: adaptive quadrature of the LLR density directly
    m, s = 2 / sigma**2, 2 / sigma
    val, _ = integrate.quad(lambda l: stats.norm.pdf(l, m, s) * f(l), m - 30 * s, m + 30 * s,
                            points=[0.0], limit=500, epsabs=1e-14, epsrel=1e-12)
    return val


def test_simple_capacities():
    assert capacity(BEC(0.3)) == pytest.approx(0.7)
    assert capacity(BSC(0.11)) == pytest.approx(0.5, abs=1e-3)
    assert capacity(BSC(0.0)) == 1.0


def test_biawgn_capacity_at_table_capacity_limit():
    ch = BIAWGN.from_ebno_db(0.187, 0.5)
    assert capacity(ch) == pytest.approx(0.5, abs=1e-3)


@pytest.mark.parametrize("sigma", [0.3, 0.6, 0.978, 1.5, 3.0])
def test_biawgn_capacity_matches_direct_integral(sigma):
    ref = 1 - _awgn_integral(lambda l: np.logaddexp(0, -l) / LN2, sigma)
    assert capacity(BIAWGN(sigma)) == pytest.approx(ref, abs=1e-10)


@pytest.mark.parametrize("sigma", [0.35, 0.8, 1.2])
@pytest.mark.parametrize("p", [1, 2, 7, 50])
def test_biawgn_moments_match_direct_integral(sigma, p):
    # the half-line form of the moment, integrated independently
    m, s = 2 / sigma**2, 2 / sigma
    ref, _ = integrate.quad(
        lambda l: stats.norm.pdf(l, m, s) * (1 + math.exp(-l)) * math.tanh(l / 2) ** (2 * p),
        0, m + 30 * s, limit=500, epsabs=1e-14, epsrel=1e-12,
    )
    assert g_moment(BIAWGN(sigma), p) == pytest.approx(ref, rel=1e-8, abs=1e-13)


def test_biawgn_g1_monte_carlo():
    sigma = 1.0
    rng = np.random.default_rng(20240601)
    llr = rng.normal(2 / sigma**2, 2 / sigma, size=10_000_000)
    samples = np.tanh(llr / 2) ** 2
    est, se = samples.mean(), samples.std(ddof=1) / math.sqrt(samples.size)
    assert abs(g_moment(BIAWGN(sigma), 1) - est) <= 3 * se


@given(st.floats(0, 1), st.integers(1, 50))
def test_bec_moments_are_constant(eps, p):
    assert g_moment(BEC(eps), p) == pytest.approx(1 - eps, abs=1e-15)


@given(st.floats(0, 0.5), st.integers(1, 50))
def test_bsc_moments_closed_form(w, p):
    assert abs(g_moment(BSC(w), p) - (1 - 2 * w) ** (2 * p)) <= 1e-12


def test_bsc_moments_from_llr_law():
    w = 0.07
    d = as_discrete(BSC(w))
    assert np.allclose(d.g_moments(30), BSC(w).g_moments(30), atol=1e-14)


@pytest.mark.parametrize("ch", [BSC(0.02), BSC(0.3), BIAWGN(0.5), BIAWGN(1.3)])
def test_moments_strictly_decrease_in_p(ch):
    g = g_moments(ch, 40)
    assert np.all(np.diff(g) < 0)
    assert np.all((g >= 0) & (g <= 1))


@pytest.mark.parametrize("family,params", [
    ("bec", [0.1, 0.3, 0.6, 0.9]),
    ("bsc", [0.01, 0.05, 0.2, 0.4]),
    ("biawgn", [0.4, 0.8, 1.2, 2.0]),
])
def test_capacity_decreases_as_channel_worsens(family, params):
    make = {"bec": BEC, "bsc": BSC, "biawgn": BIAWGN}[family]
    caps = [capacity(make(t)) for t in params]
    assert all(a > b for a, b in zip(caps, caps[1:]))


def test_h2_endpoints():
    assert h2(0.5) == 1.0
    assert h2(0.0) == 0.0
    assert h2(1.0) == 0.0
    with pytest.raises(ValidationError):
        h2(1.5)


def test_series_constant_sums_to_one():
    # (1 / (2 ln 2)) sum 1/(p(2p-1)) = 1, i.e. sum 1/(2p(2p-1)) = ln 2
    for P in (10, 100, 1000, 100000):
        partial = math.fsum(series_weights(P)) / (2 * LN2)
        tail = series_tail(P) / (2 * LN2)
        assert partial + tail == pytest.approx(1.0, abs=1e-14)
        assert tail > 0
    assert series_tail(0) == pytest.approx(2 * LN2, abs=1e-15)


def test_series_tail_matches_explicit_summation():
    P = 25
    explicit = math.fsum(1 / (p * (2 * p - 1)) for p in range(P + 1, 2_000_000))
    explicit += 1 / (2 * 2_000_000)  # integral estimate of what is left
    assert series_tail(P) == pytest.approx(explicit, rel=1e-9)


@given(st.floats(0, 1), st.integers(1, 60))
@settings(max_examples=200)
def test_h2_series_brackets_entropy(x, pmax):
    s = h2_series(x, pmax)
    exact = h2(x)
    assert s.partial_sum - s.remainder_bound <= exact + 1e-12
    assert exact <= s.partial_sum + 1e-12


def test_h2_series_converges():
    s = h2_series(0.2, 400)
    assert s.partial_sum == pytest.approx(h2(0.2), abs=1e-12)
    assert s.remainder_bound < 1e-12


def test_puncture_channel_scaling():
    base = BIAWGN(0.9)
    half = puncture_channel(base, 0.5)
    assert g_moment(half, 1) == pytest.approx(0.5 * g_moment(base, 1), abs=1e-12)
    assert capacity(half) == pytest.approx(0.5 * capacity(base), abs=1e-15)
    same = puncture_channel(base, 0.0)
    assert capacity(same) == capacity(base)
    assert np.array_equal(g_moments(same, 5), g_moments(base, 5))
    dead = puncture_channel(base, 1.0)
    assert capacity(dead) == 0.0
    assert not np.any(g_moments(dead, 5))


def test_uncoded_error_probabilities():
    assert uncoded_error_prob(BSC(0.1)) == 0.1
    assert uncoded_error_prob(BEC(0.4)) == 0.2
    sigma = 0.8
    ref = _awgn_integral(lambda l: 1.0 if l < 0 else 0.0, sigma)
    assert uncoded_error_prob(BIAWGN(sigma)) == pytest.approx(ref, abs=1e-9)


channels = st.one_of(
    st.floats(0, 1).map(BEC),
    st.floats(0, 0.5).map(BSC),
    st.floats(0.2, 5.0).map(BIAWGN),
)


@given(channels)
@settings(max_examples=200, deadline=None)
def test_g1_dominates_uncoded_error_bound(ch):
    w = uncoded_error_prob(ch)
    assert g_moment(ch, 1) >= (1 - 2 * w) ** 2 - 1e-12


def test_ebno_conversion_round_trip():
    s = ebno_db_to_sigma(0.187, 0.5)
    assert sigma_to_ebno_db(s, 0.5) == pytest.approx(0.187, abs=1e-12)
    assert s == pytest.approx(0.9787, abs=1e-4)


def test_quantized_biawgn_is_symmetric_and_degraded():
    sigma = 0.9
    q = quantize_biawgn(sigma, 8)
    assert len(q.llrs) == 8
    for l, p in zip(q.llrs, q.probs):
        j = q.llrs.index(-l)
        assert p == pytest.approx(math.exp(l) * q.probs[j], rel=1e-12)
    assert q.capacity() < capacity(BIAWGN(sigma))
    assert q.capacity() > 0.9 * capacity(BIAWGN(sigma))


def test_discrete_channel_rejects_asymmetric_law():
    with pytest.raises(ValidationError):
        DiscreteChannel((1.0, -1.0), (0.5, 0.5))


def test_quadrature_fallback_and_failure():
    loose = NumericControls(quad_nodes=5)
    assert capacity(BIAWGN(0.45), loose) == pytest.approx(capacity(BIAWGN(0.45)), abs=1e-10)
    with pytest.raises(NumericError) as info:
        capacity(BIAWGN(0.45), NumericControls(quad_nodes=5, quad_rel_tol=1e-18))
    assert info.value.achieved is not None and info.value.achieved > 1e-18


def test_parameter_validation():
    for bad in (lambda: BEC(-0.1), lambda: BSC(0.6), lambda: BIAWGN(0.0), lambda: NumericControls(series_tol=0)):
        with pytest.raises(ValidationError):
            bad()
