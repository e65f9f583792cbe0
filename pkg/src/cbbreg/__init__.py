"""Bounded-count regression with a contamination-robust mixture family.

The response is a count y in {0, ..., m}.  Three nested families are
available: binomial, beta-binomial (overdispersion), and a contaminated
beta-binomial whose second mixture component inflates the dispersion to
absorb extreme observations.  Each distribution parameter can be
regressed on covariates through its own link.
"""

from .data import Dataset, design_matrix
from .dataio import CsvSchema, read_dataset, write_dataset, write_report
from .distributions import (MomentSet, bb_log_pmf, bb_moments,
                            binom_log_pmf, binom_moments,
                            brute_force_moments, cbb_log_pmf, cbb_moments,
                            cbb_sample)
from .estimator import BoundedCountRegression
from .inference import (InferenceReport, LRTestResult, information_criteria,
                        lr_test, standard_errors)
from .links import LINK_KINDS, apply_inverse_link, apply_link
from .regression import (FAMILIES, Coefficients, FitControl, FitResult,
                         ModelSpec, e_step, fit, initialize,
                         linear_predictors, m_step_gamma, m_step_q2,
                         n_parameters, observed_log_likelihood)
from .simulation import (StudyConfig, StudyReport, contaminate,
                         generate_binomial_data, run_sensitivity_study)
from .special import chi_square_survival, log_beta, log_choose, log_gamma

__version__ = "0.1.0"

__all__ = [
    "BoundedCountRegression", "Coefficients", "CsvSchema", "Dataset",
    "FAMILIES", "FitControl", "FitResult", "InferenceReport", "LINK_KINDS",
    "LRTestResult", "ModelSpec", "MomentSet", "StudyConfig", "StudyReport",
    "apply_inverse_link", "apply_link", "bb_log_pmf", "bb_moments",
    "binom_log_pmf", "binom_moments", "brute_force_moments",
    "cbb_log_pmf", "cbb_moments", "cbb_sample", "chi_square_survival",
    "contaminate", "design_matrix", "e_step", "fit",
    "generate_binomial_data", "information_criteria", "initialize",
    "linear_predictors", "log_beta", "log_choose", "log_gamma",
    "lr_test", "m_step_gamma", "m_step_q2", "n_parameters",
    "observed_log_likelihood", "read_dataset", "run_sensitivity_study",
    "standard_errors", "write_dataset", "write_report",
]
