"""Regression models for bounded counts.

Three nested families share one interface:

* ``binomial``: logit(pi) = x'beta
* ``beta_binomial``: adds log(sigma) = u'alpha for overdispersion
* ``contaminated_beta_binomial``: adds logit(delta) = v'gamma and
  log(eta - 1) = z'lambda for an inflated-dispersion mixture component

The binomial and beta-binomial fits are direct numerical maximum
likelihood.  The contaminated fit runs an EM algorithm: the E-step
computes each row's posterior probability of coming from the contaminant
component, the M-step updates gamma in closed form (or by weighted
logistic Newton steps when delta has covariates) and ascends the weighted
beta-binomial objective Q2 jointly over (beta, alpha, lambda).  Any
M-step that fails to improve falls back to the current values, so the
observed log-likelihood never decreases.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import optimize

from .data import Dataset, design_matrix
from .distributions import ETA_MAX, SIGMA_MIN, _PmfKernel
from .links import apply_inverse_link

FAMILIES = ("binomial", "beta_binomial", "contaminated_beta_binomial")

_JITTER_SCALE = 0.25
_JITTER_SEED = 202_407
_LAMBDA_FREEZE_TOTAL_WEIGHT = 1e-6
_Q2_ASCENT_SLACK = 1e-12
_PREDICTOR_FLAG_LIMIT = 30.0
_INIT_DELTA = 0.05
_INIT_ETA = 1.5
_FALLBACK_DELTA = 1e-10
_EM_INNER_BUDGET = 8
_POLISH_TRIGGER = 1e-3
_POLISH_CADENCE = 25
_MAX_POLISH = 8


@dataclass(frozen=True)
class ModelSpec:
    """Which family to fit and which covariates drive each parameter.

    Each parameter gets an implicit intercept; term lists name covariate
    columns of the dataset (empty means intercept-only).
    """

    family: str = "contaminated_beta_binomial"
    pi_terms: tuple = ()
    sigma_terms: tuple = ()
    delta_terms: tuple = ()
    eta_terms: tuple = ()

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}")
        for name in ("pi_terms", "sigma_terms", "delta_terms", "eta_terms"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if self.family == "binomial" and (self.sigma_terms or self.delta_terms
                                          or self.eta_terms):
            raise ValueError("binomial uses only pi_terms")
        if self.family == "beta_binomial" and (self.delta_terms or self.eta_terms):
            raise ValueError("beta_binomial uses only pi_terms and sigma_terms")


@dataclass
class Coefficients:
    """Coefficient vectors for the four linear predictors.

    ``lambda_`` carries the eta block (trailing underscore because of the
    keyword).  Unused blocks for the smaller families stay at zero.
    """

    beta: np.ndarray
    alpha: np.ndarray
    gamma: np.ndarray
    lambda_: np.ndarray

    def __post_init__(self):
        for name in ("beta", "alpha", "gamma", "lambda_"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.ndim != 1 or not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} must be a finite vector")
            setattr(self, name, arr)

    def copy(self) -> "Coefficients":
        return Coefficients(self.beta.copy(), self.alpha.copy(),
                            self.gamma.copy(), self.lambda_.copy())


@dataclass
class FitControl:
    """Stopping rule and inner-optimizer settings shared by all fits."""

    epsilon: float = 1e-10
    max_iterations: int = 1000
    inner_optimizer: str = "quasi_newton"
    inner_tolerance: float = 1e-8
    restarts: int = 0

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.inner_optimizer not in ("simplex", "quasi_newton"):
            raise ValueError("inner_optimizer must be 'simplex' or 'quasi_newton'")
        if self.inner_tolerance <= 0:
            raise ValueError("inner_tolerance must be positive")
        if self.restarts < 0:
            raise ValueError("restarts must be non-negative")


@dataclass
class FitResult:
    coefficients: Coefficients
    log_likelihood: float
    posterior_weights: np.ndarray
    iterations: int
    converged: bool
    trace: list
    diagnostics: dict = field(default_factory=dict)


class _Design:
    """Design matrices and pmf cache for one (dataset, spec) pair."""

    def __init__(self, data: Dataset, spec: ModelSpec):
        self.data = data
        self.spec = spec
        self.x_pi, self.pi_names = design_matrix(data, spec.pi_terms)
        self.x_sigma, self.sigma_names = design_matrix(data, spec.sigma_terms)
        self.x_delta, self.delta_names = design_matrix(data, spec.delta_terms)
        self.x_eta, self.eta_names = design_matrix(data, spec.eta_terms)
        self.kernel = _PmfKernel(data.y, data.m)

    def zero_coefficients(self) -> Coefficients:
        return Coefficients(np.zeros(self.x_pi.shape[1]),
                            np.zeros(self.x_sigma.shape[1]),
                            np.zeros(self.x_delta.shape[1]),
                            np.zeros(self.x_eta.shape[1]))

    def row_params(self, coeffs: Coefficients):
        pi = apply_inverse_link("logit", self.x_pi @ coeffs.beta)
        sigma = apply_inverse_link("log", self.x_sigma @ coeffs.alpha)
        delta = apply_inverse_link("logit", self.x_delta @ coeffs.gamma)
        eta = apply_inverse_link("shifted_log", self.x_eta @ coeffs.lambda_)
        return pi, sigma, delta, eta


def active_blocks(spec: ModelSpec) -> tuple:
    """Coefficient blocks that are free parameters under the family."""
    if spec.family == "binomial":
        return ("beta",)
    if spec.family == "beta_binomial":
        return ("beta", "alpha")
    return ("beta", "alpha", "gamma", "lambda_")


def pack_coefficients(coeffs: Coefficients, spec: ModelSpec) -> np.ndarray:
    """Concatenate the family's active blocks into one parameter vector."""
    return np.concatenate([getattr(coeffs, b) for b in active_blocks(spec)])


def unpack_coefficients(vector, spec: ModelSpec, template: Coefficients) -> Coefficients:
    """Inverse of pack_coefficients; inactive blocks come from the template."""
    vector = np.asarray(vector, dtype=float)
    out = template.copy()
    pos = 0
    for name in active_blocks(spec):
        size = getattr(template, name).size
        setattr(out, name, vector[pos:pos + size].copy())
        pos += size
    if pos != vector.size:
        raise ValueError("parameter vector length does not match the spec")
    return out


def n_parameters(spec: ModelSpec, data: Dataset) -> int:
    """Number of free coefficients the family estimates on this data."""
    design = _Design(data, spec)
    template = design.zero_coefficients()
    return sum(getattr(template, b).size for b in active_blocks(spec))


def _loglik(design: _Design, coeffs: Coefficients) -> float:
    pi, sigma, delta, eta = design.row_params(coeffs)
    family = design.spec.family
    if family == "binomial":
        rows = design.kernel.binom(pi)
    elif family == "beta_binomial":
        rows = design.kernel.bb(pi, sigma)
    else:
        rows = design.kernel.cbb(pi, sigma, delta, eta)
    return float(np.sum(rows))


def linear_predictors(data: Dataset, spec: ModelSpec, coeffs: Coefficients):
    """Per-row (pi, sigma, delta, eta) after the inverse links."""
    return _Design(data, spec).row_params(coeffs)


def observed_log_likelihood(data: Dataset, spec: ModelSpec,
                            coeffs: Coefficients) -> float:
    """Total log-likelihood of the data under the family in spec."""
    value = _loglik(_Design(data, spec), coeffs)
    if not np.isfinite(value):
        raise ValueError("log-likelihood is not finite at these coefficients")
    return value


def _e_step(design: _Design, coeffs: Coefficients) -> np.ndarray:
    pi, sigma, delta, eta = design.row_params(coeffs)
    lp_con = design.kernel.bb(pi, eta * sigma)
    lp_mix = np.logaddexp(np.log1p(-delta) + design.kernel.bb(pi, sigma),
                          np.log(delta) + lp_con)
    return np.clip(np.exp(np.log(delta) + lp_con - lp_mix), 0.0, 1.0)


def e_step(data: Dataset, spec: ModelSpec, coeffs: Coefficients) -> np.ndarray:
    """Posterior probability that each row came from the contaminant component."""
    if spec.family != "contaminated_beta_binomial":
        raise ValueError("e_step is defined for the contaminated family only")
    return _e_step(_Design(data, spec), coeffs)


def _q1(w, x_delta, gamma):
    delta = apply_inverse_link("logit", x_delta @ gamma)
    return float(np.sum(w * np.log(delta) + (1.0 - w) * np.log1p(-delta)))


def _m_step_gamma(w: np.ndarray, design: _Design, current: np.ndarray) -> np.ndarray:
    x_delta = design.x_delta
    if x_delta.shape[1] == 1:
        wbar = float(np.mean(w))
        if wbar < 1e-10 or wbar > 1.0 - 1e-10:
            warnings.warn("degenerate posterior weights; clamping the delta update",
                          RuntimeWarning, stacklevel=2)
            wbar = min(max(wbar, 1e-10), 1.0 - 1e-10)
        return np.array([np.log(wbar) - np.log1p(-wbar)])
    # Weighted logistic Newton ascent with step halving, warm-started.
    gamma = current.astype(float).copy()
    w = np.clip(w, 1e-10, 1.0 - 1e-10)
    value = _q1(w, x_delta, gamma)
    identity = np.eye(x_delta.shape[1])
    for _ in range(60):
        delta = apply_inverse_link("logit", x_delta @ gamma)
        grad = x_delta.T @ (w - delta)
        if np.max(np.abs(grad)) < 1e-10 * max(1.0, len(w)):
            break
        hess = (x_delta * (delta * (1.0 - delta))[:, None]).T @ x_delta
        try:
            step = np.linalg.solve(hess + 1e-12 * identity, grad)
        except np.linalg.LinAlgError:
            break
        scale = 1.0
        improved = False
        for _ in range(30):
            candidate = gamma + scale * step
            cand_value = _q1(w, x_delta, candidate)
            if np.isfinite(cand_value) and cand_value > value:
                gamma, value = candidate, cand_value
                improved = True
                break
            scale *= 0.5
        if not improved:
            break
    return gamma


def m_step_gamma(weights, data: Dataset, spec: ModelSpec, current=None) -> np.ndarray:
    """Update the delta-block coefficients given posterior weights.

    Intercept-only: the closed form logit(mean(weights)).  With covariates:
    Newton ascent on the fractional-response logistic objective, warm
    started at ``current`` (zeros if omitted).
    """
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0.0) or np.any(w > 1.0):
        raise ValueError("weights must lie in [0, 1]")
    design = _Design(data, spec)
    if current is None:
        current = np.zeros(design.x_delta.shape[1])
    return _m_step_gamma(w, design, np.asarray(current, dtype=float))


def _q2(design: _Design, w, one_minus_w, beta, alpha, lambda_):
    pi = apply_inverse_link("logit", design.x_pi @ beta)
    sigma = apply_inverse_link("log", design.x_sigma @ alpha)
    eta = apply_inverse_link("shifted_log", design.x_eta @ lambda_)
    return float(np.sum(one_minus_w * design.kernel.bb(pi, sigma)
                        + w * design.kernel.bb(pi, eta * sigma)))


def _minimize(fun, x0, control: FitControl, budget: int):
    if control.inner_optimizer == "quasi_newton":
        return optimize.minimize(fun, x0, method="BFGS",
                                 options={"gtol": control.inner_tolerance,
                                          "maxiter": budget})
    return optimize.minimize(fun, x0, method="Nelder-Mead",
                             options={"xatol": control.inner_tolerance,
                                      "fatol": control.inner_tolerance,
                                      "maxiter": budget * (len(np.atleast_1d(x0)) + 1)})


def _m_step_q2(w, design: _Design, current: Coefficients, control: FitControl,
               freeze_lambda: bool, budget: int = 100):
    one_minus_w = 1.0 - w
    n_beta = current.beta.size
    n_alpha = current.alpha.size
    lam_fixed = current.lambda_

    def split(theta):
        beta = theta[:n_beta]
        alpha = theta[n_beta:n_beta + n_alpha]
        lam = lam_fixed if freeze_lambda else theta[n_beta + n_alpha:]
        return beta, alpha, lam

    def neg_q2(theta):
        value = _q2(design, w, one_minus_w, *split(theta))
        return -value if np.isfinite(value) else 1e308

    pieces = [current.beta, current.alpha]
    if not freeze_lambda:
        pieces.append(current.lambda_)
    theta0 = np.concatenate(pieces)
    q2_start = _q2(design, w, one_minus_w, current.beta, current.alpha, lam_fixed)

    result = _minimize(neg_q2, theta0, control, budget)
    best_theta, best_value = theta0, q2_start
    if np.all(np.isfinite(result.x)) and np.isfinite(result.fun) \
            and -result.fun >= best_value - _Q2_ASCENT_SLACK:
        best_theta, best_value = result.x, -result.fun
    if best_value <= q2_start + _Q2_ASCENT_SLACK:
        # No real progress; one polish attempt with the other optimizer.
        other = FitControl(epsilon=control.epsilon,
                           max_iterations=control.max_iterations,
                           inner_optimizer=("simplex" if control.inner_optimizer
                                            == "quasi_newton" else "quasi_newton"),
                           inner_tolerance=control.inner_tolerance,
                           restarts=0)
        retry = _minimize(neg_q2, theta0, other, budget)
        if np.all(np.isfinite(retry.x)) and np.isfinite(retry.fun) \
                and -retry.fun > best_value:
            best_theta, best_value = retry.x, -retry.fun
    beta, alpha, lam = split(np.asarray(best_theta, dtype=float))
    moved = best_value > q2_start + _Q2_ASCENT_SLACK
    return beta.copy(), alpha.copy(), np.asarray(lam, dtype=float).copy(), moved


def m_step_q2(weights, data: Dataset, spec: ModelSpec, current: Coefficients,
              control: FitControl):
    """Ascend the weighted beta-binomial objective jointly over (beta, alpha, lambda).

    Returns the new (beta, alpha, lambda) vectors; on optimizer failure the
    current values come back unchanged (Q2 never decreases by more than
    1e-12).  The lambda block is held fixed when the total posterior weight
    is below 1e-6, since an empty contaminant component leaves it
    unidentified.
    """
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0.0) or np.any(w > 1.0):
        raise ValueError("weights must lie in [0, 1]")
    design = _Design(data, spec)
    freeze = float(np.sum(w)) < _LAMBDA_FREEZE_TOTAL_WEIGHT
    beta, alpha, lam, _ = _m_step_q2(w, design, current, control, freeze)
    return beta, alpha, lam


def _direct_ml(design: _Design, start: Coefficients, control: FitControl):
    spec = design.spec
    theta0 = pack_coefficients(start, spec)

    def neg_ll(theta):
        value = _loglik(design, unpack_coefficients(theta, spec, start))
        return -value if np.isfinite(value) else 1e308

    trace = [-neg_ll(theta0)]

    def record(theta, *_):
        trace.append(-neg_ll(np.asarray(theta)))

    budget = 2000
    if control.inner_optimizer == "quasi_newton":
        result = optimize.minimize(neg_ll, theta0, method="BFGS", callback=record,
                                   options={"gtol": control.inner_tolerance,
                                            "maxiter": budget})
        # status 2 is precision loss at a flat spot; accept it when the
        # gradient is small relative to the log-likelihood scale.
        grad_ok = np.max(np.abs(result.jac)) <= 1e-3 * (1.0 + abs(result.fun))
        converged = bool(result.success or (result.status == 2 and grad_ok))
    else:
        result = optimize.minimize(neg_ll, theta0, method="Nelder-Mead",
                                   callback=record,
                                   options={"xatol": control.inner_tolerance,
                                            "fatol": control.inner_tolerance,
                                            "maxiter": budget * (theta0.size + 1)})
        converged = bool(result.success)
    coeffs = unpack_coefficients(result.x, spec, start)
    final_ll = float(-result.fun)
    if not trace or final_ll > trace[-1]:
        trace.append(final_ll)
    return coeffs, final_ll, trace, int(result.nit), converged and np.isfinite(final_ll)


def _fit_binomial(design: _Design, init, control: FitControl) -> FitResult:
    start = design.zero_coefficients()
    if init is not None:
        start.beta = np.asarray(init.beta, dtype=float).copy()
    coeffs, ll, trace, nit, converged = _direct_ml(design, start, control)
    return FitResult(coefficients=coeffs, log_likelihood=ll,
                     posterior_weights=np.zeros(design.data.n),
                     iterations=nit, converged=converged, trace=trace,
                     diagnostics=_diagnostics(design, coeffs))


def _fit_beta_binomial(design: _Design, init, control: FitControl) -> FitResult:
    data, spec = design.data, design.spec
    b_spec = ModelSpec(family="binomial", pi_terms=spec.pi_terms)
    b_fit = _fit_binomial(_Design(data, b_spec), None, control)
    start = design.zero_coefficients()
    start.beta = b_fit.coefficients.beta.copy()
    if init is not None:
        start.beta = np.asarray(init.beta, dtype=float).copy()
        start.alpha = np.asarray(init.alpha, dtype=float).copy()
    coeffs, ll, trace, nit, converged = _direct_ml(design, start, control)
    # The binomial is the sigma -> 0 boundary of this model; keep whichever
    # of the optimizer result and that boundary candidate scores better, so
    # the nesting chain holds even when the data carry no overdispersion.
    boundary = design.zero_coefficients()
    boundary.beta = b_fit.coefficients.beta.copy()
    boundary.alpha[0] = np.log(SIGMA_MIN)
    boundary_ll = _loglik(design, boundary)
    if np.isfinite(boundary_ll) and boundary_ll > ll:
        coeffs, ll, converged = boundary, boundary_ll, True
        trace = trace + [boundary_ll]
    return FitResult(coefficients=coeffs, log_likelihood=ll,
                     posterior_weights=np.zeros(data.n),
                     iterations=nit, converged=converged, trace=trace,
                     diagnostics=_diagnostics(design, coeffs))


def initialize(data: Dataset, spec: ModelSpec, control: FitControl) -> Coefficients:
    """Starting coefficients for the contaminated fit.

    Fits the beta-binomial with the same pi and sigma predictors, copies
    its coefficients, and starts the mixture at delta = 0.05, eta = 1.5.
    """
    design = _Design(data, spec)
    coeffs, _ = _initial_coefficients(design, control)
    return coeffs


def _initial_coefficients(design: _Design, control: FitControl):
    data, spec = design.data, design.spec
    bb_spec = ModelSpec(family="beta_binomial", pi_terms=spec.pi_terms,
                        sigma_terms=spec.sigma_terms)
    bb_fit = _fit_beta_binomial(_Design(data, bb_spec), None, control)
    coeffs = design.zero_coefficients()
    coeffs.beta = bb_fit.coefficients.beta.copy()
    coeffs.alpha = bb_fit.coefficients.alpha.copy()
    coeffs.gamma[0] = np.log(_INIT_DELTA) - np.log1p(-_INIT_DELTA)
    coeffs.lambda_[0] = np.log(_INIT_ETA - 1.0)
    return coeffs, bb_fit.log_likelihood


def _polish(design: _Design, coeffs: Coefficients, control: FitControl):
    """Quasi-Newton pass on the observed log-likelihood, warm-started.

    Returns (coefficients, log-likelihood, stationary) where stationary
    means the optimizer stopped at a point it considers a maximum.
    """
    spec = design.spec
    theta0 = pack_coefficients(coeffs, spec)

    def neg_ll(theta):
        value = _loglik(design, unpack_coefficients(theta, spec, coeffs))
        return -value if np.isfinite(value) else 1e308

    result = _minimize(neg_ll, theta0, control, budget=200)
    if not (np.all(np.isfinite(result.x)) and np.isfinite(result.fun)):
        return coeffs, -np.inf, False
    if control.inner_optimizer == "quasi_newton":
        grad_ok = np.max(np.abs(result.jac)) <= 1e-3 * (1.0 + abs(result.fun))
        stationary = bool(result.success or (result.status == 2 and grad_ok))
    else:
        stationary = bool(result.success)
    return unpack_coefficients(result.x, spec, coeffs), float(-result.fun), stationary


def _em(design: _Design, start: Coefficients, control: FitControl):
    coeffs = start.copy()
    ll = _loglik(design, coeffs)
    trace = [ll]
    converged = False
    fallbacks = 0
    polishes = 0
    iterations = 0
    for iterations in range(1, control.max_iterations + 1):
        cycle_start = ll
        w = _e_step(design, coeffs)
        coeffs = replace(coeffs, gamma=_m_step_gamma(w, design, coeffs.gamma))
        freeze = float(np.sum(w)) < _LAMBDA_FREEZE_TOTAL_WEIGHT
        beta, alpha, lam, moved = _m_step_q2(w, design, coeffs, control, freeze,
                                             _EM_INNER_BUDGET)
        if not moved:
            fallbacks += 1
        coeffs = replace(coeffs, beta=beta, alpha=alpha, lambda_=lam)
        ll = _loglik(design, coeffs)
        trace.append(ll)
        due = (ll - cycle_start < _POLISH_TRIGGER
               or iterations % _POLISH_CADENCE == 0)
        if due and polishes < _MAX_POLISH:
            # EM contracts linearly near a maximum, so once its steps go
            # small, finish with a direct ascent on the observed likelihood.
            # Only improvements are accepted, keeping the trace monotone.
            polishes += 1
            candidate, candidate_ll, stationary = _polish(design, coeffs, control)
            gain = candidate_ll - ll
            if candidate_ll > ll:
                coeffs, ll = candidate, candidate_ll
                trace.append(ll)
            if stationary and gain < control.epsilon:
                # The direct ascent cannot move either; stop here rather
                # than grinding out sub-epsilon EM steps.
                converged = True
                break
        if ll - cycle_start < control.epsilon:
            converged = True
            break
    return coeffs, ll, trace, iterations, converged, fallbacks, polishes


def _diagnostics(design: _Design, coeffs: Coefficients) -> dict:
    predictors = {
        "pi": design.x_pi @ coeffs.beta,
        "sigma": design.x_sigma @ coeffs.alpha,
        "delta": design.x_delta @ coeffs.gamma,
        "eta": design.x_eta @ coeffs.lambda_,
    }
    max_abs = {k: float(np.max(np.abs(v))) for k, v in predictors.items()}
    eta = apply_inverse_link("shifted_log", predictors["eta"])
    return {
        "max_abs_linear_predictor": max_abs,
        "saturated_predictors": sorted(k for k, v in max_abs.items()
                                       if v > _PREDICTOR_FLAG_LIMIT),
        "eta_near_upper_bound": bool(np.max(eta) >= 0.99 * ETA_MAX),
    }


def _fit_cbb(design: _Design, init, control: FitControl) -> FitResult:
    if init is None:
        start, bb_ll = _initial_coefficients(design, control)
    else:
        start, bb_ll = init.copy(), None
    runs = [_em(design, start, control)]
    if bb_ll is not None and runs[0][1] < bb_ll:
        # The EM run ended below the beta-binomial boundary of the mixture;
        # restart from a near-degenerate mixture sitting at that boundary.
        fallback = start.copy()
        fallback.gamma[:] = 0.0
        fallback.gamma[0] = np.log(_FALLBACK_DELTA) - np.log1p(-_FALLBACK_DELTA)
        runs.append(_em(design, fallback, control))
    for r in range(control.restarts):
        rng = np.random.default_rng((_JITTER_SEED, r))
        jittered = start.copy()
        for name in ("beta", "alpha", "gamma", "lambda_"):
            block = getattr(jittered, name)
            block += rng.normal(scale=_JITTER_SCALE, size=block.shape)
        runs.append(_em(design, jittered, control))
    coeffs, ll, trace, iterations, converged, fallbacks, polishes = max(
        runs, key=lambda r: r[1])
    weights = _e_step(design, coeffs)
    diagnostics = _diagnostics(design, coeffs)
    diagnostics["q2_fallbacks"] = fallbacks
    diagnostics["polish_attempts"] = polishes
    diagnostics["em_runs"] = len(runs)
    return FitResult(coefficients=coeffs, log_likelihood=ll,
                     posterior_weights=weights, iterations=iterations,
                     converged=converged, trace=trace, diagnostics=diagnostics)


def fit(data: Dataset, spec: ModelSpec, init: Coefficients | None = None,
        control: FitControl | None = None) -> FitResult:
    """Fit the family in spec to the data by maximum likelihood.

    Direct numerical ML for the binomial and beta-binomial families, EM for
    the contaminated family.  Non-convergence is reported through
    ``FitResult.converged``, not raised.
    """
    if control is None:
        control = FitControl()
    design = _Design(data, spec)
    if spec.family == "binomial":
        return _fit_binomial(design, init, control)
    if spec.family == "beta_binomial":
        return _fit_beta_binomial(design, init, control)
    return _fit_cbb(design, init, control)
