"""Scikit-learn style wrapper around the regression fitter.

BoundedCountRegression follows the estimator protocol: constructor
arguments are stored verbatim, ``fit`` learns and returns self, fitted
state lives in trailing-underscore attributes, and get_params/set_params
(inherited) make the object clonable in pipelines and search loops.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .data import Dataset
from .distributions import bb_log_pmf, binom_log_pmf, cbb_log_pmf
from .links import apply_inverse_link
from .regression import FitControl, ModelSpec, fit as _fit_model


def _as_columns(X, feature_names=None):
    """Normalize X (DataFrame, mapping, or 2-D array) to a column dict."""
    if hasattr(X, "columns") and hasattr(X, "loc"):
        return {str(name): np.asarray(X[name]) for name in X.columns}
    if isinstance(X, dict):
        return {str(name): np.asarray(values) for name, values in X.items()}
    array = np.asarray(X)
    if array.ndim == 1:
        array = array[:, None]
    if array.ndim != 2:
        raise ValueError("X must be two-dimensional")
    if feature_names is not None and len(feature_names) == array.shape[1]:
        names = feature_names
    else:
        names = [f"x{j}" for j in range(array.shape[1])]
    return {name: array[:, j] for j, name in enumerate(names)}


class BoundedCountRegression(BaseEstimator):
    """Regression for counts y in {0, ..., m} with a known trial count.

    ``family`` picks the response distribution: "binomial",
    "beta_binomial", or "contaminated_beta_binomial" (the default, which
    absorbs extreme counts into an inflated-dispersion mixture component).
    ``pi_terms=None`` regresses the mean on every column of X; the other
    parameters default to intercept-only.
    """

    def __init__(self, family="contaminated_beta_binomial", pi_terms=None,
                 sigma_terms=(), delta_terms=(), eta_terms=(),
                 epsilon=1e-10, max_iterations=1000,
                 inner_optimizer="quasi_newton", inner_tolerance=1e-8,
                 restarts=0):
        self.family = family
        self.pi_terms = pi_terms
        self.sigma_terms = sigma_terms
        self.delta_terms = delta_terms
        self.eta_terms = eta_terms
        self.epsilon = epsilon
        self.max_iterations = max_iterations
        self.inner_optimizer = inner_optimizer
        self.inner_tolerance = inner_tolerance
        self.restarts = restarts

    def fit(self, X, y, m):
        """Fit on covariates X, counts y, and trial counts m (int or array)."""
        columns = _as_columns(X)
        data = Dataset(y=np.asarray(y), m=m, columns=columns)
        pi_terms = tuple(columns) if self.pi_terms is None \
            else tuple(self.pi_terms)
        spec = ModelSpec(family=self.family, pi_terms=pi_terms,
                         sigma_terms=tuple(self.sigma_terms),
                         delta_terms=tuple(self.delta_terms),
                         eta_terms=tuple(self.eta_terms))
        control = FitControl(epsilon=self.epsilon,
                             max_iterations=self.max_iterations,
                             inner_optimizer=self.inner_optimizer,
                             inner_tolerance=self.inner_tolerance,
                             restarts=self.restarts)
        result = _fit_model(data, spec, control=control)
        self.feature_names_ = list(columns)
        self.spec_ = spec
        self.result_ = result
        self.coef_ = result.coefficients
        self.log_likelihood_ = result.log_likelihood
        self.n_iter_ = result.iterations
        self.converged_ = result.converged
        self.posterior_weights_ = result.posterior_weights
        # Frozen category levels, so prediction encodes indicators exactly
        # as the fit did even when new data misses some levels.
        self.levels_ = {name: sorted({str(v) for v in values})
                        for name, values in data.columns.items()
                        if values.dtype.kind not in "fiub"}
        return self

    def _check_fitted(self):
        if not hasattr(self, "coef_"):
            raise NotFittedError("call fit before predicting")

    def _matrix(self, columns, terms, n):
        pieces = [np.ones(n)]
        for term in terms:
            if term not in columns:
                raise ValueError(f"X is missing fitted column {term!r}")
            values = columns[term]
            if term in self.levels_:
                levels = self.levels_[term]
                strings = np.array([str(v) for v in values], dtype=object)
                unseen = set(strings) - set(levels)
                if unseen:
                    raise ValueError(f"column {term!r} has categories not "
                                     f"seen in fit: {sorted(unseen)}")
                for level in levels[1:]:
                    pieces.append((strings == level).astype(float))
            else:
                numeric = np.asarray(values, dtype=float)
                if not np.all(np.isfinite(numeric)):
                    raise ValueError(f"column {term!r} has non-finite values")
                pieces.append(numeric)
        return np.column_stack(pieces)

    def predict_params(self, X):
        """Per-row (pi, sigma, delta, eta) at the fitted coefficients."""
        self._check_fitted()
        columns = _as_columns(X, self.feature_names_)
        if columns:
            n = len(next(iter(columns.values())))
        else:
            n = np.asarray(X).shape[0]
        spec, c = self.spec_, self.coef_
        return {
            "pi": apply_inverse_link(
                "logit", self._matrix(columns, spec.pi_terms, n) @ c.beta),
            "sigma": apply_inverse_link(
                "log", self._matrix(columns, spec.sigma_terms, n) @ c.alpha),
            "delta": apply_inverse_link(
                "logit", self._matrix(columns, spec.delta_terms, n) @ c.gamma),
            "eta": apply_inverse_link(
                "shifted_log",
                self._matrix(columns, spec.eta_terms, n) @ c.lambda_),
        }

    def predict(self, X, m):
        """Expected counts m * pi at the fitted coefficients."""
        pi = self.predict_params(X)["pi"]
        return np.broadcast_to(np.asarray(m, dtype=float), pi.shape) * pi

    def score(self, X, y, m):
        """Mean per-observation log-likelihood (higher is better)."""
        params = self.predict_params(X)
        y = np.asarray(y)
        if self.spec_.family == "binomial":
            rows = binom_log_pmf(y, m, params["pi"])
        elif self.spec_.family == "beta_binomial":
            rows = bb_log_pmf(y, m, params["pi"], params["sigma"])
        else:
            rows = cbb_log_pmf(y, m, params["pi"], params["sigma"],
                               params["delta"], params["eta"])
        return float(np.mean(rows))
