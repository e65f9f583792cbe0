"""Model comparison and standard errors for fitted regressions.

Information criteria and likelihood-ratio tests work from log-likelihood
values alone.  Standard errors come from a central finite-difference
Hessian of the observed log-likelihood at the fitted coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .regression import (FitResult, ModelSpec, _Design, _loglik,
                         active_blocks, pack_coefficients,
                         unpack_coefficients)
from .special import chi_square_survival

_SATURATION_LIMIT = 30.0

_BLOCK_PARAM = {"beta": "pi", "alpha": "sigma", "gamma": "delta",
                "lambda_": "eta"}
_BLOCK_NAMES = {"beta": "pi_names", "alpha": "sigma_names",
                "gamma": "delta_names", "lambda_": "eta_names"}


def information_criteria(log_likelihood: float, n_parameters: int,
                         n_observations: int) -> tuple:
    """Return (AIC, BIC, HQIC) for a fitted model.

    AIC = 2k - 2l, BIC = k ln(n) - 2l, HQIC = 2k ln(ln(n)) - 2l.
    """
    if n_parameters < 1:
        raise ValueError("n_parameters must be at least 1")
    if n_observations < 2:
        raise ValueError("n_observations must be at least 2")
    k = float(n_parameters)
    n = float(n_observations)
    deviance = -2.0 * float(log_likelihood)
    aic = 2.0 * k + deviance
    bic = k * math.log(n) + deviance
    hqic = 2.0 * k * math.log(math.log(n)) + deviance
    return aic, bic, hqic


@dataclass
class LRTestResult:
    statistic: float
    df: int
    p_value: float


def lr_test(log_likelihood_null: float, log_likelihood_alt: float,
            df: int) -> LRTestResult:
    """Likelihood-ratio test of a nested null against the larger model.

    The statistic is clipped at zero (a nested null can only score lower
    up to numerical noise).  The p-value uses the chi-square reference
    with the stated degrees of freedom; for hypotheses that pin a mixture
    parameter to the edge of its range (no contamination, equal dispersion
    between components) that reference is approximate and errs on the
    conservative side.
    """
    if df < 1:
        raise ValueError("df must be at least 1")
    statistic = max(0.0, 2.0 * (float(log_likelihood_alt)
                                - float(log_likelihood_null)))
    return LRTestResult(statistic=statistic, df=int(df),
                        p_value=chi_square_survival(statistic, df))


@dataclass
class InferenceReport:
    parameter_names: list
    estimates: np.ndarray
    standard_errors: np.ndarray | None
    aic: float
    bic: float
    hqic: float
    hessian_ok: bool
    unreliable: bool
    condition_number: float | None


def _fd_hessian(fun, theta: np.ndarray) -> np.ndarray:
    """Central finite-difference Hessian with per-coordinate steps."""
    k = theta.size
    h = np.maximum(1e-5, 1e-4 * np.abs(theta))
    hess = np.empty((k, k))
    f0 = fun(theta)
    for j in range(k):
        ej = np.zeros(k)
        ej[j] = h[j]
        hess[j, j] = (fun(theta + ej) - 2.0 * f0 + fun(theta - ej)) / h[j] ** 2
    for i in range(k):
        ei = np.zeros(k)
        ei[i] = h[i]
        for j in range(i + 1, k):
            ej = np.zeros(k)
            ej[j] = h[j]
            value = (fun(theta + ei + ej) - fun(theta + ei - ej)
                     - fun(theta - ei + ej) + fun(theta - ei - ej))
            hess[i, j] = hess[j, i] = value / (4.0 * h[i] * h[j])
    return hess


def _parameter_names(design: _Design) -> list:
    names = []
    for block in active_blocks(design.spec):
        label = _BLOCK_PARAM[block]
        for column in getattr(design, _BLOCK_NAMES[block]):
            names.append(f"{label}:{column}")
    return names


def standard_errors(data: Dataset, spec: ModelSpec,
                    fit_result: FitResult) -> InferenceReport:
    """Standard errors and information criteria at the fitted coefficients.

    The covariance is the inverse of the negated finite-difference Hessian.
    When that matrix is not positive definite, ``hessian_ok`` comes back
    False and the standard errors are omitted.  ``unreliable`` flags fits
    whose linear predictors saturate a link, where curvature says little.
    """
    if not fit_result.converged:
        raise ValueError("standard errors require a converged fit")
    design = _Design(data, spec)
    coeffs = fit_result.coefficients
    theta = pack_coefficients(coeffs, spec)
    aic, bic, hqic = information_criteria(fit_result.log_likelihood,
                                          theta.size, data.n)

    predictors = [design.x_pi @ coeffs.beta, design.x_sigma @ coeffs.alpha,
                  design.x_delta @ coeffs.gamma, design.x_eta @ coeffs.lambda_]
    unreliable = any(np.max(np.abs(p)) > _SATURATION_LIMIT for p in predictors)

    def loglik_at(vector):
        return _loglik(design, unpack_coefficients(vector, spec, coeffs))

    neg_hessian = -_fd_hessian(loglik_at, theta)
    ses = None
    hessian_ok = bool(np.all(np.isfinite(neg_hessian)))
    condition = None
    if hessian_ok:
        try:
            np.linalg.cholesky(neg_hessian)
            covariance = np.linalg.inv(neg_hessian)
            ses = np.sqrt(np.diag(covariance))
            condition = float(np.linalg.cond(neg_hessian))
        except np.linalg.LinAlgError:
            hessian_ok = False
            ses = None
    return InferenceReport(parameter_names=_parameter_names(design),
                           estimates=theta.copy(),
                           standard_errors=ses,
                           aic=aic, bic=bic, hqic=hqic,
                           hessian_ok=hessian_ok,
                           unreliable=unreliable,
                           condition_number=condition)
