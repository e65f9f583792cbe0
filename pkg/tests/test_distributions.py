"""Distribution-level checks: normalization, moments, limits, sampling.

The closed-form moments are validated against brute-force summation of
the PMF, so the two sides come from independent code paths.
"""

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cbbreg.distributions import (MomentSet, bb_log_pmf, bb_moments,
                                  binom_log_pmf, binom_moments,
                                  brute_force_moments, cbb_log_pmf,
                                  cbb_moments, cbb_sample)

M_GRID = (1, 2, 5, 10, 50)
PI_GRID = (0.05, 0.3, 0.5, 0.7, 0.95)
SIGMA_GRID = (0.01, 0.1, 1.0, 10.0)
DELTA_GRID = (0.05, 0.25, 0.6)
ETA_GRID = (1.5, 5.0, 100.0)


def pmf(log_pmf_fn, m, *params):
    return np.exp(log_pmf_fn(np.arange(m + 1), m, *params))


def mixed_relative(a, b):
    """Relative error that degrades to absolute near zero."""
    return abs(a - b) / max(1.0, abs(b))


# ---------------------------------------------------------------- pmf values


def test_binom_pmf_matches_direct_formula():
    m, p = 12, 0.37
    probs = pmf(binom_log_pmf, m, p)
    for y in range(m + 1):
        exact = math.comb(m, y) * p ** y * (1 - p) ** (m - y)
        assert abs(probs[y] - exact) < 1e-14


def test_cbb_is_the_stated_two_component_mixture():
    for m in (5, 20):
        for piv in (0.3, 0.5):
            for sigma in (0.05, 2.0):
                for delta in DELTA_GRID:
                    for eta in ETA_GRID:
                        mix = np.exp(cbb_log_pmf(np.arange(m + 1), m, piv,
                                                 sigma, delta, eta))
                        ref = pmf(bb_log_pmf, m, piv, sigma)
                        con = pmf(bb_log_pmf, m, piv, eta * sigma)
                        direct = (1 - delta) * ref + delta * con
                        rel = np.abs(mix - direct) / np.maximum(direct, 1e-300)
                        assert np.max(rel) < 1e-13


def test_normalization_over_grid():
    for m in M_GRID:
        for piv in PI_GRID:
            assert abs(pmf(binom_log_pmf, m, piv).sum() - 1.0) <= 1e-12
            for sigma in SIGMA_GRID:
                assert abs(pmf(bb_log_pmf, m, piv, sigma).sum() - 1.0) <= 1e-12
                for delta in DELTA_GRID:
                    for eta in ETA_GRID:
                        total = pmf(cbb_log_pmf, m, piv, sigma, delta,
                                    eta).sum()
                        assert abs(total - 1.0) <= 1e-12


def test_normalization_large_m_fallback_path():
    # m beyond the rising-factorial cutoff exercises the log-beta branch.
    for m in (600, 1500):
        total = pmf(bb_log_pmf, m, 0.3, 0.5).sum()
        assert abs(total - 1.0) <= 1e-10


def test_bb_pmf_matches_high_precision_at_large_m():
    mpmath.mp.dps = 40
    m, piv, sigma = 700, 0.41, 0.8
    a, b = mpmath.mpf(piv) / mpmath.mpf(sigma), \
        (1 - mpmath.mpf(piv)) / mpmath.mpf(sigma)
    ours = bb_log_pmf(np.arange(0, m + 1, 37), m, piv, sigma)
    for y, got in zip(range(0, m + 1, 37), ours):
        want = float(mpmath.log(mpmath.binomial(m, y)
                                * mpmath.beta(y + a, m - y + b)
                                / mpmath.beta(a, b)))
        assert abs(got - want) <= 1e-11 * max(1.0, abs(want))


# ------------------------------------------------------------------- moments


def test_binom_moments_against_brute_force():
    for m in M_GRID:
        for piv in PI_GRID:
            got = binom_moments(m, piv)
            want = brute_force_moments(m, lambda y: binom_log_pmf(y, m, piv))
            for g, w in zip(got, want):
                assert mixed_relative(g, w) <= 1e-10


def test_bb_moments_against_brute_force():
    for m in M_GRID:
        for piv in PI_GRID:
            for sigma in SIGMA_GRID:
                got = bb_moments(m, piv, sigma)
                want = brute_force_moments(
                    m, lambda y: bb_log_pmf(y, m, piv, sigma))
                for g, w in zip(got, want):
                    assert mixed_relative(g, w) <= 1e-10


def test_cbb_moments_against_brute_force():
    worst = 0.0
    for m in M_GRID:
        for piv in PI_GRID:
            for sigma in SIGMA_GRID:
                for delta in DELTA_GRID:
                    for eta in ETA_GRID:
                        got = cbb_moments(m, piv, sigma, delta, eta)
                        want = brute_force_moments(
                            m, lambda y: cbb_log_pmf(y, m, piv, sigma,
                                                     delta, eta))
                        for g, w in zip(got, want):
                            err = mixed_relative(g, w)
                            worst = max(worst, err)
                            assert err <= 1e-10
    assert worst <= 1e-10


def test_variance_ordering_is_strict_over_grid():
    for m in M_GRID:
        for piv in PI_GRID:
            var_b = binom_moments(m, piv).variance
            for sigma in SIGMA_GRID:
                var_bb = bb_moments(m, piv, sigma).variance
                if m > 1:
                    assert var_bb > var_b
                for delta in DELTA_GRID:
                    for eta in ETA_GRID:
                        var_cbb = cbb_moments(m, piv, sigma, delta,
                                              eta).variance
                        if m > 1:
                            assert var_cbb > var_bb > var_b


def test_skewness_sign_tracks_the_mean():
    for m in M_GRID:
        for piv in PI_GRID:
            for sigma in SIGMA_GRID:
                for delta in DELTA_GRID:
                    for eta in ETA_GRID:
                        skew = cbb_moments(m, piv, sigma, delta, eta).skewness
                        if piv == 0.5:
                            assert abs(skew) < 1e-12
                        else:
                            assert np.sign(skew) == np.sign(1 - 2 * piv)


def test_bb_excess_kurtosis_minimum_at_half():
    """At pi = 0.5 the excess kurtosis reduces to a short closed form."""
    for m in (2, 10, 50):
        for sigma in SIGMA_GRID:
            got = bb_moments(m, 0.5, sigma).excess_kurtosis
            want = -2 * (3 * m * sigma * (m * sigma + 1) + sigma + 1) / \
                (m * (1 + 3 * sigma) * (1 + m * sigma))
            assert abs(got - want) < 1e-12


def test_bb_kurtosis_crossover_near_documented_pi():
    """Excess kurtosis at sigma=0.1 and sigma=1 (m=10) cross close to
    pi = 0.223 and its mirror 0.777."""

    def gap(piv):
        return (bb_moments(10, piv, 0.1).excess_kurtosis
                - bb_moments(10, piv, 1.0).excess_kurtosis)

    for lo, hi, expect in ((0.1, 0.4, 0.223), (0.6, 0.9, 0.777)):
        assert gap(lo) * gap(hi) < 0
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if gap(lo) * gap(mid) <= 0:
                hi = mid
            else:
                lo = mid
        root = 0.5 * (lo + hi)
        assert round(root, 3) == expect
        assert abs(gap(root)) <= 1e-6


def test_moment_set_fields():
    ms = binom_moments(10, 0.5)
    assert isinstance(ms, MomentSet)
    assert ms._fields == ("mean", "variance", "skewness", "excess_kurtosis")
    assert ms.mean == 5.0


def test_brute_force_moments_rejects_non_normalized():
    with pytest.raises(ValueError):
        brute_force_moments(5, lambda y: binom_log_pmf(y, 5, 0.4) - 0.5)


# -------------------------------------------------------------------- limits


def test_cbb_approaches_bb_as_delta_vanishes():
    m, piv, sigma, eta = 10, 0.3, 0.5, 5.0
    reference = pmf(bb_log_pmf, m, piv, sigma)
    gaps = []
    for delta in (1e-2, 1e-4, 1e-6):
        mixture = pmf(cbb_log_pmf, m, piv, sigma, delta, eta)
        gaps.append(np.max(np.abs(mixture - reference)))
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 1e-5


def test_cbb_approaches_bb_as_eta_drops_to_one():
    m, piv, sigma, delta = 10, 0.3, 0.5, 0.25
    reference = pmf(bb_log_pmf, m, piv, sigma)
    gaps = []
    for eta in (1 + 1e-2, 1 + 1e-4, 1 + 1e-6):
        mixture = pmf(cbb_log_pmf, m, piv, sigma, delta, eta)
        gaps.append(np.max(np.abs(mixture - reference)))
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 1e-5


def test_bb_approaches_binomial_as_sigma_vanishes():
    for m in (1, 10, 50):
        for piv in (0.05, 0.5, 0.95):
            gap = np.max(np.abs(pmf(bb_log_pmf, m, piv, 1e-9)
                                - pmf(binom_log_pmf, m, piv)))
            assert gap <= 1e-6


# ------------------------------------------------------------------ sampling


def test_sampler_matches_closed_form_moments():
    m, piv, sigma, delta, eta = 10, 0.5, 0.1, 0.25, 10.0
    want = cbb_moments(m, piv, sigma, delta, eta)
    draws = cbb_sample(200_000, m, piv, sigma, delta, eta, seed=99)
    assert draws.min() >= 0 and draws.max() <= m
    assert np.issubdtype(draws.dtype, np.integer)
    se_mean = math.sqrt(want.variance / draws.size)
    assert abs(draws.mean() - want.mean) < 4 * se_mean
    assert abs(draws.var() - want.variance) < 0.05 * want.variance


def test_sampler_is_deterministic_given_seed():
    a = cbb_sample(1000, 8, 0.4, 0.3, 0.2, 7.0, seed=5)
    b = cbb_sample(1000, 8, 0.4, 0.3, 0.2, 7.0, seed=5)
    c = cbb_sample(1000, 8, 0.4, 0.3, 0.2, 7.0, seed=6)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


# ------------------------------------------------------------ admissible box


def test_out_of_box_parameters_are_rejected():
    y = np.arange(6)
    with pytest.raises(ValueError):
        bb_log_pmf(y, 5, 0.0, 1.0)
    with pytest.raises(ValueError):
        bb_log_pmf(y, 5, 1.0, 1.0)
    with pytest.raises(ValueError):
        bb_log_pmf(y, 5, 0.5, 0.0)
    with pytest.raises(ValueError):
        bb_log_pmf(y, 5, 0.5, 1e15)
    with pytest.raises(ValueError):
        cbb_log_pmf(y, 5, 0.5, 1.0, 1.5, 2.0)
    with pytest.raises(ValueError):
        cbb_log_pmf(y, 5, 0.5, 1.0, 0.2, 1.0)


def test_counts_outside_support_are_rejected():
    with pytest.raises(ValueError):
        binom_log_pmf(np.array([-1]), 5, 0.5)
    with pytest.raises(ValueError):
        binom_log_pmf(np.array([6]), 5, 0.5)
    with pytest.raises(ValueError):
        binom_log_pmf(np.array([2.5]), 5, 0.5)


# ------------------------------------------------------- property-based sweep


admissible = st.tuples(
    st.integers(min_value=1, max_value=40),
    st.floats(min_value=0.02, max_value=0.98),
    st.floats(min_value=1e-3, max_value=50.0),
    st.floats(min_value=0.01, max_value=0.9),
    st.floats(min_value=1.01, max_value=50.0),
)


@settings(max_examples=60, deadline=None)
@given(admissible)
def test_random_parameters_give_a_probability_vector(params):
    m, piv, sigma, delta, eta = params
    probs = pmf(cbb_log_pmf, m, piv, sigma, delta, eta)
    assert np.all(probs >= 0.0)
    assert abs(probs.sum() - 1.0) < 1e-10


@settings(max_examples=60, deadline=None)
@given(admissible)
def test_random_parameters_inflate_variance(params):
    m, piv, sigma, delta, eta = params
    var_cbb = cbb_moments(m, piv, sigma, delta, eta).variance
    var_bb = bb_moments(m, piv, sigma).variance
    assert var_cbb >= var_bb - 1e-12


@settings(max_examples=40, deadline=None)
@given(admissible)
def test_random_parameters_match_brute_force_mean(params):
    m, piv, sigma, delta, eta = params
    got = cbb_moments(m, piv, sigma, delta, eta)
    want = brute_force_moments(
        m, lambda y: cbb_log_pmf(y, m, piv, sigma, delta, eta))
    assert mixed_relative(got.mean, want.mean) < 1e-9
    assert mixed_relative(got.variance, want.variance) < 1e-9
