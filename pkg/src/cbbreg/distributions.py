"""Binomial, beta-binomial, and contaminated beta-binomial distributions.

The contaminated beta-binomial (cBB) is a two-component mixture: with
probability 1 - delta a count follows a beta-binomial BB(pi, sigma), and
with probability delta it follows BB(pi, eta * sigma) with eta > 1, an
inflated-dispersion component that absorbs extreme observations.

All probability mass is computed in log space.  Parameters are validated
against a closed numeric box (module constants below) that gives the open
interval constraints pi, delta in (0, 1), sigma > 0, eta > 1 a concrete
floating-point meaning.
"""

from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from .special import log_beta, log_choose

# Admissible numeric box.  Inverse links clamp into it; evaluation
# functions reject values outside it.
PI_MIN = 1e-14
PI_MAX = 1.0 - 1e-14
SIGMA_MIN = 1e-14
SIGMA_MAX = 1e14
DELTA_MIN = PI_MIN
DELTA_MAX = PI_MAX
ETA_MIN = 1.0 + 1e-14
ETA_MAX = 1e14

# Beyond this trial count the rising-factorial evaluation of the
# beta-binomial pmf (O(m) per point) switches to the O(1) log-beta form.
_RISING_FACTORIAL_MAX_M = 512


class MomentSet(NamedTuple):
    """Mean, variance, skewness and excess kurtosis of a count law."""

    mean: float
    variance: float
    skewness: float
    excess_kurtosis: float


def _check_in(value, lo, hi, name):
    arr = np.asarray(value, dtype=float)
    if arr.size and (not np.all(np.isfinite(arr)) or np.any(arr < lo) or np.any(arr > hi)):
        raise ValueError(f"{name} must lie in [{lo!r}, {hi!r}]")
    return arr


def _check_counts(y, m):
    y_arr = np.asarray(y)
    m_arr = np.asarray(m)
    if not np.all(np.isfinite(np.asarray(m_arr, dtype=float))):
        raise ValueError("m must be finite")
    if np.any(np.asarray(m_arr) < 1) or np.any(m_arr != np.floor(m_arr)):
        raise ValueError("m must be a positive integer")
    if np.any(y_arr != np.floor(y_arr)):
        raise ValueError("y must be integer valued")
    if np.any(y_arr < 0) or np.any(y_arr > m_arr):
        raise ValueError("y must lie in [0, m]")
    return np.asarray(y_arr, dtype=float), np.asarray(m_arr, dtype=float)


def binom_log_pmf(y, m, pi):
    """Log pmf of the binomial distribution with m trials and success rate pi."""
    y_arr, m_arr = _check_counts(y, m)
    pi_arr = _check_in(pi, PI_MIN, PI_MAX, "pi")
    out = (log_choose(m_arr, y_arr) + y_arr * np.log(pi_arr)
           + (m_arr - y_arr) * np.log1p(-pi_arr))
    return out


def _bb_log_pmf_core(y, m, a, b):
    # Rising-factorial form: ln C(m,y) + sum ln(a+j) + sum ln(b+j) - sum ln(a+b+j).
    # Exact integer offsets avoid the log-gamma cancellation that appears for
    # large shapes (sigma -> 0), at O(m) cost per point.
    shape = np.broadcast_shapes(y.shape, m.shape, a.shape, b.shape)
    y_b = np.broadcast_to(y, shape).ravel()
    m_b = np.broadcast_to(m, shape).ravel()
    a_b = np.broadcast_to(a, shape).ravel()
    b_b = np.broadcast_to(b, shape).ravel()
    m_max = int(m_b.max()) if m_b.size else 0
    if m_max > _RISING_FACTORIAL_MAX_M:
        out = (log_choose(m_b, y_b)
               + log_beta(y_b + a_b, m_b - y_b + b_b)
               - log_beta(a_b, b_b))
        return out.reshape(shape)
    j = np.arange(m_max, dtype=float)
    ya = np.where(j[None, :] < y_b[:, None], np.log(a_b[:, None] + j[None, :]), 0.0)
    yb = np.where(j[None, :] < (m_b - y_b)[:, None], np.log(b_b[:, None] + j[None, :]), 0.0)
    yab = np.where(j[None, :] < m_b[:, None], np.log(a_b[:, None] + b_b[:, None] + j[None, :]), 0.0)
    out = log_choose(m_b, y_b) + ya.sum(axis=1) + yb.sum(axis=1) - yab.sum(axis=1)
    return out.reshape(shape)


def bb_log_pmf(y, m, pi, sigma):
    """Log pmf of the beta-binomial distribution.

    The pmf is C(m,y) B(y + pi/sigma, m - y + (1-pi)/sigma) / B(pi/sigma,
    (1-pi)/sigma); sigma acts as an overdispersion parameter and the
    binomial is recovered as sigma -> 0.
    """
    y_arr, m_arr = _check_counts(y, m)
    pi_arr = _check_in(pi, PI_MIN, PI_MAX, "pi")
    sig_arr = _check_in(sigma, SIGMA_MIN, SIGMA_MAX, "sigma")
    a = pi_arr / sig_arr
    b = (1.0 - pi_arr) / sig_arr
    scalar = all(np.ndim(v) == 0 for v in (y, m, pi, sigma))
    out = _bb_log_pmf_core(np.atleast_1d(y_arr), np.atleast_1d(m_arr),
                           np.atleast_1d(a), np.atleast_1d(b))
    return float(out[0]) if scalar else out.reshape(np.broadcast_shapes(
        np.shape(y), np.shape(m), np.shape(pi), np.shape(sigma)))


def cbb_log_pmf(y, m, pi, sigma, delta, eta):
    """Log pmf of the contaminated beta-binomial distribution.

    Mixture of BB(pi, sigma) with weight 1 - delta and BB(pi, eta*sigma)
    with weight delta, combined in log space.
    """
    delta_arr = _check_in(delta, DELTA_MIN, DELTA_MAX, "delta")
    eta_arr = _check_in(eta, ETA_MIN, ETA_MAX, "eta")
    lp_ref = bb_log_pmf(y, m, pi, sigma)
    lp_con = bb_log_pmf(y, m, pi, np.asarray(sigma, dtype=float) * eta_arr)
    return np.logaddexp(np.log1p(-delta_arr) + lp_ref, np.log(delta_arr) + lp_con)


def _scalar_params(**kwargs):
    out = {}
    for name, value in kwargs.items():
        if np.ndim(value) != 0:
            raise ValueError(f"{name} must be a scalar")
        out[name] = float(value)
    return out


def binom_moments(m, pi) -> MomentSet:
    """Closed-form moments of the binomial distribution."""
    p = _scalar_params(m=m, pi=pi)
    _check_counts(0, p["m"])
    _check_in(p["pi"], PI_MIN, PI_MAX, "pi")
    m_, pi_ = p["m"], p["pi"]
    q = pi_ * (1.0 - pi_)
    return MomentSet(
        mean=m_ * pi_,
        variance=m_ * q,
        skewness=(1.0 - 2.0 * pi_) / np.sqrt(m_ * q),
        excess_kurtosis=(1.0 - 6.0 * q) / (m_ * q),
    )


def bb_moments(m, pi, sigma) -> MomentSet:
    """Closed-form moments of the beta-binomial distribution."""
    p = _scalar_params(m=m, pi=pi, sigma=sigma)
    _check_counts(0, p["m"])
    _check_in(p["pi"], PI_MIN, PI_MAX, "pi")
    _check_in(p["sigma"], SIGMA_MIN, SIGMA_MAX, "sigma")
    m_, pi_, s = p["m"], p["pi"], p["sigma"]
    q = pi_ * (1.0 - pi_)
    var = m_ * q * (1.0 + (m_ - 1.0) * s / (1.0 + s))
    skew = ((1.0 - 2.0 * pi_) * (2.0 * m_ * s + 1.0)
            / ((2.0 * s + 1.0) * np.sqrt(m_ * q * (m_ * s + 1.0) / (s + 1.0))))
    # Numerator arranged so the pi = 0.5 value is
    # -2 (3 m s (m s + 1) + s + 1) / (m (1 + 3 s) (1 + m s)).
    exkurt = ((s + 1.0) * (s * (6.0 * m_ * (m_ * s + 1.0) - 1.0) + 1.0)
              - 6.0 * q * (m_ * (6.0 * s + 5.0) * s * (m_ * s + 1.0) + s + 1.0)) \
        / (q * m_ * (2.0 * s + 1.0) * (3.0 * s + 1.0) * (m_ * s + 1.0))
    return MomentSet(mean=m_ * pi_, variance=var, skewness=skew,
                     excess_kurtosis=exkurt)


def _bb_third_central(m, pi, s):
    q = pi * (1.0 - pi)
    return (m * q * (1.0 - 2.0 * pi) * (1.0 + m * s) * (1.0 + 2.0 * m * s)
            / ((1.0 + s) * (1.0 + 2.0 * s)))


def _bb_fourth_kernel(m, pi, s):
    # Fourth central moment of BB(pi, s) divided by m pi (1 - pi).
    qn = (pi - 1.0) * pi
    return ((m * s + 1.0)
            * (6.0 * (3.0 * qn + 1.0) * m * m * s * s
               + 3.0 * m * s * (2.0 - qn * (m - 6.0))
               - 3.0 * qn * (m - 2.0) - s + 1.0)
            / ((s + 1.0) * (2.0 * s + 1.0) * (3.0 * s + 1.0)))


def cbb_moments(m, pi, sigma, delta, eta) -> MomentSet:
    """Closed-form moments of the contaminated beta-binomial distribution.

    The mean is m*pi regardless of sigma, delta, eta; higher moments mix
    the two beta-binomial components' central moments.
    """
    p = _scalar_params(m=m, pi=pi, sigma=sigma, delta=delta, eta=eta)
    _check_counts(0, p["m"])
    _check_in(p["pi"], PI_MIN, PI_MAX, "pi")
    _check_in(p["sigma"], SIGMA_MIN, SIGMA_MAX, "sigma")
    _check_in(p["delta"], DELTA_MIN, DELTA_MAX, "delta")
    _check_in(p["eta"], ETA_MIN, ETA_MAX, "eta")
    m_, pi_, s, d, e = p["m"], p["pi"], p["sigma"], p["delta"], p["eta"]
    q = pi_ * (1.0 - pi_)
    var = (m_ * q * ((1.0 - d) * (1.0 + m_ * s) * (1.0 + e * s)
                     + d * (1.0 + m_ * e * s) * (1.0 + s))
           / ((1.0 + s) * (1.0 + e * s)))
    third = (1.0 - d) * _bb_third_central(m_, pi_, s) + d * _bb_third_central(m_, pi_, e * s)
    skew = third / var ** 1.5
    fourth_kernel = ((1.0 - d) * _bb_fourth_kernel(m_, pi_, s)
                     + d * _bb_fourth_kernel(m_, pi_, e * s))
    exkurt = -3.0 + m_ * q * fourth_kernel / var ** 2
    return MomentSet(mean=m_ * pi_, variance=var, skewness=skew,
                     excess_kurtosis=exkurt)


def cbb_sample(count, m, pi, sigma, delta, eta, seed):
    """Draw counts from the contaminated beta-binomial distribution.

    Uses the hierarchical representation: W is eta with probability delta
    and 1 otherwise, p* ~ Beta(pi/(W sigma), (1-pi)/(W sigma)) via a ratio
    of gamma variates, and y ~ Binomial(m, p*).  Reproducible given seed.
    """
    if np.ndim(count) != 0 or count < 1 or int(count) != count:
        raise ValueError("count must be a positive integer")
    p = _scalar_params(m=m, pi=pi, sigma=sigma, delta=delta, eta=eta)
    _check_counts(0, p["m"])
    _check_in(p["pi"], PI_MIN, PI_MAX, "pi")
    _check_in(p["sigma"], SIGMA_MIN, SIGMA_MAX, "sigma")
    _check_in(p["delta"], DELTA_MIN, DELTA_MAX, "delta")
    _check_in(p["eta"], ETA_MIN, ETA_MAX, "eta")
    count = int(count)
    rng = np.random.default_rng(seed)
    w = np.where(rng.random(count) < p["delta"], p["eta"], 1.0)
    g1 = rng.gamma(p["pi"] / (w * p["sigma"]))
    g2 = rng.gamma((1.0 - p["pi"]) / (w * p["sigma"]))
    total = g1 + g2
    # For extreme dispersions the gamma draws can underflow to 0; the
    # limiting beta is then a Bernoulli(pi) point mass at 0 or 1.
    fallback = rng.random(count) < p["pi"]
    with np.errstate(invalid="ignore"):
        p_star = np.where(total > 0.0, g1 / np.where(total > 0.0, total, 1.0), fallback)
    return rng.binomial(int(p["m"]), p_star)


class _PmfKernel:
    """Per-dataset cache for repeated pmf evaluation at fixed (y, m).

    The fitting loops evaluate the same rows thousands of times with
    changing parameters; the binomial coefficients and the rising-factorial
    index masks depend only on (y, m) and are computed once here.
    """

    def __init__(self, y, m):
        y_arr, m_arr = _check_counts(y, m)
        self.y = y_arr
        self.m = m_arr
        self.log_c = log_choose(m_arr, y_arr)
        self.m_max = int(m_arr.max())
        self.fast = self.m_max <= _RISING_FACTORIAL_MAX_M
        if self.fast:
            j = np.arange(self.m_max, dtype=float)[None, :]
            self.j = j
            self.mask_a = j < y_arr[:, None]
            self.mask_b = j < (m_arr - y_arr)[:, None]
            self.mask_c = j < m_arr[:, None]

    def binom(self, pi):
        """Per-row binomial log pmf at success rates pi."""
        return (self.log_c + self.y * np.log(pi)
                + (self.m - self.y) * np.log1p(-pi))

    def bb(self, pi, sigma):
        """Per-row beta-binomial log pmf at (pi, sigma)."""
        a = pi / sigma
        b = (1.0 - pi) / sigma
        if not self.fast:
            return (self.log_c + log_beta(self.y + a, self.m - self.y + b)
                    - log_beta(a, b))
        sa = (np.log(a[:, None] + self.j) * self.mask_a).sum(axis=1)
        sb = (np.log(b[:, None] + self.j) * self.mask_b).sum(axis=1)
        sc = (np.log(a[:, None] + b[:, None] + self.j) * self.mask_c).sum(axis=1)
        return self.log_c + sa + sb - sc

    def cbb(self, pi, sigma, delta, eta):
        """Per-row contaminated beta-binomial log pmf."""
        lp_ref = self.bb(pi, sigma)
        lp_con = self.bb(pi, eta * sigma)
        return np.logaddexp(np.log1p(-delta) + lp_ref, np.log(delta) + lp_con)


def brute_force_moments(m, log_pmf: Callable) -> MomentSet:
    """Moments by direct summation over the support {0, ..., m}.

    Independent oracle for the closed-form moment functions.  log_pmf maps
    an integer array of counts to log probabilities; the exponentiated
    values must sum to 1 within 1e-9.
    """
    if np.ndim(m) != 0 or m < 1 or int(m) != m:
        raise ValueError("m must be a positive integer")
    y = np.arange(int(m) + 1)
    try:
        log_vals = np.asarray(log_pmf(y), dtype=float)
        if log_vals.shape != y.shape:
            raise TypeError
    except TypeError:
        log_vals = np.asarray([float(log_pmf(int(v))) for v in y], dtype=float)
    prob = np.exp(log_vals)
    total = prob.sum()
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"pmf sums to {total!r}, not 1 within 1e-9")
    mean = float((y * prob).sum())
    centered = y - mean
    variance = float((centered ** 2 * prob).sum())
    third = float((centered ** 3 * prob).sum())
    fourth = float((centered ** 4 * prob).sum())
    return MomentSet(mean=mean, variance=variance,
                     skewness=third / variance ** 1.5,
                     excess_kurtosis=fourth / variance ** 2 - 3.0)
