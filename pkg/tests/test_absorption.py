import math

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given

from oracles import hitting_moments_dense, pmf_by_propagation
from threshold_aoi.absorption import (
    cycle_length_pmf,
    cycle_moments_exact,
    expected_cycle_length,
    expected_cycle_length_oracle,
    spectral_terms,
    update_rate,
)
from threshold_aoi.aoi_series import second_moment_tail_bound, smallest_truncation
from threshold_aoi.model import validate_params as vp


@pytest.mark.parametrize("p, q, T, expected", [
    (0.5, 0.5, 2, 4.0),
    (0.6, 0.2, 2, 4.0),
    (0.6, 0.2, 1, 1.25),
    (0.3, 0.3, 1, 1 / 0.6),
])
def test_expected_cycle_length(p, q, T, expected):
    params = vp(p, q, T)
    assert expected_cycle_length(params) == pytest.approx(expected, rel=1e-14)
    assert expected_cycle_length_oracle(params) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("p, q, T, rate", [
    (0.5, 0.5, 1, 1.0),
    (0.5, 0.5, 4, 0.0625),
    (0.5, 0.5, 5, 0.04),
])
def test_update_rate(p, q, T, rate):
    assert update_rate(vp(p, q, T)) == rate


grid = [(p, q, T) for T in (1, 2, 3, 7, 20, 64)
        for p, q in ((0.3, 0.3), (0.6, 0.2), (0.1, 0.8), (0.25, 0.25 + 1e-10),
                     (0.25, 0.25 + 2e-9), (0.45, 0.45 + 1e-7), (0.02, 0.05))]


@pytest.mark.parametrize("p, q, T", grid)
def test_closed_form_matches_linear_solve(p, q, T):
    params = vp(p, q, T)
    closed = expected_cycle_length(params)
    assert closed == pytest.approx(expected_cycle_length_oracle(params), rel=1e-9)
    if T <= 20:
        assert closed == pytest.approx(hitting_moments_dense(p, q, T)[0], rel=1e-9)


def test_exact_moments_symmetric():
    # simple symmetric walk from 0 to +-T: E[L] = T^2, E[L^2] = (5T^4 - 2T^2)/3
    for T in range(1, 8):
        m1, m2 = cycle_moments_exact(vp(0.5, 0.5, T))
        assert m1 == T * T
        assert m2 * 3 == 5 * T**4 - 2 * T**2


@pytest.mark.parametrize("p, q", [(0.3, 0.3), (0.4, 0.4), (0.5, 0.5), (0.6, 0.2), (0.4, 0.1)])
def test_update_rate_decreases_in_T(p, q):
    rates = [update_rate(vp(p, q, T)) for T in range(1, 21)]
    assert all(a > b for a, b in zip(rates, rates[1:]))


def test_spectral_examples():
    (t1,) = spectral_terms(vp(0.5, 0.5, 1))
    assert t1.alpha == 0.0 and t1.s == math.inf
    terms = {t.nu: t for t in spectral_terms(vp(0.5, 0.5, 2))}
    assert terms[3].alpha == pytest.approx(-0.7071067811865476, abs=1e-15)
    assert terms[3].c == pytest.approx(-0.7071067811865476, abs=1e-15)
    assert terms[2].c == 0.0 and terms[2].skippable
    for T in (2, 3, 6):
        assert all(t.c == 0.0 for t in spectral_terms(vp(0.3, 0.4, T)) if t.nu % 2 == 0)


params_st = st.tuples(
    st.floats(min_value=1e-4, max_value=0.9999),
    st.floats(min_value=1e-4, max_value=0.9999),
    st.integers(min_value=1, max_value=50),
).filter(lambda t: t[0] + t[1] <= 1.0).map(lambda t: vp(*t))


@given(params_st)
def test_alpha_inside_unit_interval(params):
    for t in spectral_terms(params):
        assert -1.0 < t.alpha < 1.0
        assert t.alpha == pytest.approx(
            1 - params.p - params.q + 2 * math.sqrt(params.p * params.q)
            * math.cos(t.nu * math.pi / (2 * params.T)), abs=1e-15)


@pytest.mark.parametrize("p, q, T, expected", [
    (0.3, 0.3, 1, [0.6, 0.24, 0.096]),
    (0.5, 0.5, 2, [0.0, 0.5, 0.0, 0.25]),
    (0.5, 0.5, 3, [0.0]),
])
def test_pmf_examples(p, q, T, expected):
    pmf = cycle_length_pmf(vp(p, q, T), len(expected))
    np.testing.assert_allclose(pmf.probabilities, expected, atol=1e-15)


@pytest.mark.parametrize("p, q, T", [(0.3, 0.3, 2), (0.6, 0.2, 3), (0.4, 0.1, 5),
                                     (0.5, 0.5, 6), (0.2, 0.7, 4), (0.05, 0.1, 8)])
def test_pmf_matches_propagation(p, q, T):
    pmf = cycle_length_pmf(vp(p, q, T), 400)
    np.testing.assert_allclose(pmf.probabilities, pmf_by_propagation(p, q, T, 400), atol=1e-12)


@pytest.mark.parametrize("T", [2, 3, 9])
def test_pmf_unreachable_below_T(T):
    pmf = cycle_length_pmf(vp(0.35, 0.25, T), T + 2)
    assert np.all(pmf.probabilities[: T - 1] == 0.0)
    assert pmf.probabilities[T - 1] > 0.0


@pytest.mark.parametrize("p, q, T", [(0.3, 0.3, 4), (0.5, 0.5, 5), (0.6, 0.2, 6), (0.4, 0.1, 3)])
def test_pmf_normalised_and_mean(p, q, T):
    params = vp(p, q, T)
    l_max = smallest_truncation(lambda n: second_moment_tail_bound(params, n), 1e-9)
    pmf = cycle_length_pmf(params, l_max)
    tail = second_moment_tail_bound(params, l_max)
    assert abs(pmf.probabilities.sum() - 1.0) <= 1e-9 + 1e-13
    mean = pmf.probabilities @ pmf.lengths
    assert abs(mean - expected_cycle_length(params)) <= tail + 1e-12
