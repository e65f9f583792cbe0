"""Command-line interface: fit models, run the sensitivity study, query PMFs.

Three subcommands:

* ``fit``: read a CSV, fit one family (optionally comparing against the
  nested families), write a JSON or table report.
* ``simulate``: run the contamination sensitivity study and print the
  bias/MSE table.
* ``dist``: print the PMF and moments of one distribution.

Exit codes are stable for scripting: 0 success, 1 usage or input error,
2 numerical non-convergence (including the study's failure-rate cap).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from .dataio import (CsvSchema, format_report_table, read_dataset,
                     report_payload, write_report)
from .distributions import (bb_log_pmf, bb_moments, binom_log_pmf,
                            binom_moments, cbb_log_pmf, cbb_moments)
from .inference import lr_test, standard_errors
from .regression import FitControl, ModelSpec, fit
from .simulation import StudyConfig, run_sensitivity_study

_FAMILY_ALIASES = {
    "b": "binomial", "binom": "binomial", "binomial": "binomial",
    "bb": "beta_binomial", "beta_binomial": "beta_binomial",
    "cbb": "contaminated_beta_binomial",
    "contaminated_beta_binomial": "contaminated_beta_binomial",
}
_SHORT_NAME = {"binomial": "B", "beta_binomial": "BB",
               "contaminated_beta_binomial": "cBB"}
_LADDER = ("binomial", "beta_binomial", "contaminated_beta_binomial")


@dataclass
class CliConfig:
    """Parsed command-line options for one invocation."""

    subcommand: str
    input: str | None = None
    family: str = "contaminated_beta_binomial"
    formulas: dict = field(default_factory=dict)
    response: str | None = None
    trials: str = "m"
    delimiter: str = ","
    header: bool = True
    compare: bool = False
    output: str | None = None
    format: str = "json"
    epsilon: float = 1e-10
    max_iterations: int = 1000
    optimizer: str = "quasi_newton"
    restarts: int = 0
    seed: int = 0
    n: int = 500
    m: int = 10
    beta0: float = 2.0
    beta1: float = 1.0
    fractions: tuple = (0.01, 0.05)
    replications: int = 1000
    pi: float | None = None
    sigma: float | None = None
    delta: float | None = None
    eta: float | None = None


def parse_formula(text: str) -> tuple:
    """Terms on the right-hand side of 'response ~ term + term'.

    The left-hand side is ignored; '1' means intercept-only.  Returns the
    term names in order of first appearance.
    """
    rhs = text.split("~", 1)[1] if "~" in text else text
    terms = []
    for raw in rhs.split("+"):
        term = raw.strip()
        if not term:
            raise ValueError(f"empty term in formula {text!r}")
        if term == "1" or term in terms:
            continue
        terms.append(term)
    return tuple(terms)


def _resolve_family(name: str) -> str:
    key = name.strip().lower()
    if key not in _FAMILY_ALIASES:
        raise ValueError(f"unknown family {name!r}; use one of "
                         f"b, bb, cbb")
    return _FAMILY_ALIASES[key]


def _build_spec(family: str, formulas: dict) -> ModelSpec:
    terms = {param: parse_formula(formulas.get(param, "~ 1"))
             for param in ("pi", "sigma", "delta", "eta")}
    return ModelSpec(family=family, pi_terms=terms["pi"],
                     sigma_terms=terms["sigma"], delta_terms=terms["delta"],
                     eta_terms=terms["eta"])


def _nested_spec(family: str, spec: ModelSpec) -> ModelSpec:
    if family == "binomial":
        return ModelSpec(family=family, pi_terms=spec.pi_terms)
    return ModelSpec(family=family, pi_terms=spec.pi_terms,
                     sigma_terms=spec.sigma_terms)


def _emit(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        try:
            with open(output, "w", encoding="utf-8") as handle:
                handle.write(text)
        except OSError as exc:
            raise OSError(f"cannot write to {output}: {exc}") from exc


def cmd_fit(config: CliConfig) -> int:
    family = _resolve_family(config.family)
    spec = _build_spec(family, config.formulas)
    response = config.response
    if response is None:
        pi_formula = config.formulas.get("pi", "")
        response = (pi_formula.split("~", 1)[0].strip()
                    if "~" in pi_formula else "") or "y"
    trials = int(config.trials) if config.trials.isdigit() else config.trials
    covariates = []
    for terms in (spec.pi_terms, spec.sigma_terms, spec.delta_terms,
                  spec.eta_terms):
        for term in terms:
            if term not in covariates:
                covariates.append(term)
    schema = CsvSchema(response_column=response, trials_column=trials,
                       covariate_columns=tuple(covariates),
                       delimiter=config.delimiter, header=config.header)
    data = read_dataset(config.input, schema)
    control = FitControl(epsilon=config.epsilon,
                         max_iterations=config.max_iterations,
                         inner_optimizer=config.optimizer,
                         restarts=config.restarts)

    ladder = list(_LADDER[:_LADDER.index(family) + 1]) if config.compare \
        else [family]
    if config.compare and len(ladder) == 1:
        raise ValueError("--compare needs a family with something nested "
                         "under it; the binomial is the bottom of the ladder")
    fits = {}
    for level in ladder:
        level_spec = spec if level == family else _nested_spec(level, spec)
        result = fit(data, level_spec, control=control)
        if not result.converged:
            print(f"error: {level} fit did not converge after "
                  f"{result.iterations} iterations", file=sys.stderr)
            return 2
        fits[level] = (level_spec, result, standard_errors(data, level_spec,
                                                           result))

    _, main_fit, main_report = fits[family]
    if not config.compare:
        if config.format == "json":
            payload = {"family": family}
            payload.update(report_payload(main_fit, main_report))
            _emit(json.dumps(payload, indent=2) + "\n", config.output)
        else:
            text = f"family: {family}\n" + format_report_table(main_fit,
                                                               main_report)
            _emit(text, config.output)
        return 0

    criteria = []
    for level in ladder:
        _, level_fit, level_report = fits[level]
        criteria.append({"family": level,
                         "k": len(level_report.parameter_names),
                         "log_likelihood": level_fit.log_likelihood,
                         "aic": level_report.aic, "bic": level_report.bic,
                         "hqic": level_report.hqic})
    order = sorted(range(len(criteria)), key=lambda i: criteria[i]["aic"])
    for rank, index in enumerate(order, start=1):
        criteria[index]["rank"] = rank
    null_level, alt_level = ladder[-2], ladder[-1]
    test = lr_test(fits[null_level][1].log_likelihood,
                   fits[alt_level][1].log_likelihood,
                   df=criteria[-1]["k"] - criteria[-2]["k"])
    lr_payload = {"null": null_level, "alternative": alt_level,
                  "statistic": test.statistic, "df": test.df,
                  "p_value": test.p_value}

    if config.format == "json":
        payload = {"family": family}
        payload.update(report_payload(main_fit, main_report))
        payload["compare"] = {"criteria": criteria, "lr_test": lr_payload}
        _emit(json.dumps(payload, indent=2) + "\n", config.output)
        return 0
    lines = [f"family: {family}",
             format_report_table(main_fit, main_report).rstrip("\n"), "",
             "model      k  log-lik      AIC       BIC       HQIC      rank"]
    for row in criteria:
        lines.append(f"{_SHORT_NAME[row['family']]:<9s} {row['k']:>2d}  "
                     f"{row['log_likelihood']:>9.3f} {row['aic']:>9.3f} "
                     f"{row['bic']:>9.3f} {row['hqic']:>9.3f} {row['rank']:>5d}")
    lines.append(f"LR {_SHORT_NAME[null_level]} vs {_SHORT_NAME[alt_level]}: "
                 f"statistic {test.statistic:.3f}, df {test.df}, "
                 f"p {test.p_value:.4f}")
    _emit("\n".join(lines) + "\n", config.output)
    return 0


def cmd_simulate(config: CliConfig) -> int:
    study = StudyConfig(n=config.n, m=config.m,
                        beta=(config.beta0, config.beta1),
                        fractions=config.fractions,
                        replications=config.replications, seed=config.seed)
    control = FitControl(epsilon=config.epsilon,
                         max_iterations=config.max_iterations,
                         inner_optimizer=config.optimizer,
                         restarts=config.restarts)
    report = run_sensitivity_study(study, control=control)
    if config.format == "json":
        _emit(json.dumps(report.to_dict(), indent=2) + "\n", config.output)
        return 0
    lines = []
    for fraction in study.fractions:
        cells = [report.cell(fraction, family) for family in _LADDER]
        lines.append(f"contamination {100 * fraction:g}%")
        lines.append(f"{'':10s}" + "".join(f"{_SHORT_NAME[c.family]:>12s}"
                                           for c in cells))
        for label, attr, index in (("bias b0", "bias", 0), ("mse  b0", "mse", 0),
                                   ("bias b1", "bias", 1), ("mse  b1", "mse", 1)):
            values = "".join(f"{getattr(c, attr)[index]:>12.4f}" for c in cells)
            lines.append(f"{label:10s}{values}")
        fit_counts = "".join(f"{c.n_fits:>9d}/{study.replications:<2d}"
                             for c in cells)
        lines.append(f"{'fits':10s}{fit_counts}")
        lines.append("")
    _emit("\n".join(lines), config.output)
    return 0


def cmd_dist(config: CliConfig) -> int:
    family = _resolve_family(config.family)
    if config.pi is None:
        raise ValueError("--pi is required")
    y = np.arange(config.m + 1)
    moments_args: tuple
    if family == "binomial":
        log_pmf = binom_log_pmf(y, config.m, config.pi)
        moments = binom_moments(config.m, config.pi)
        params = {"pi": config.pi}
    elif family == "beta_binomial":
        if config.sigma is None:
            raise ValueError("--sigma is required for the beta-binomial")
        log_pmf = bb_log_pmf(y, config.m, config.pi, config.sigma)
        moments = bb_moments(config.m, config.pi, config.sigma)
        params = {"pi": config.pi, "sigma": config.sigma}
    else:
        missing = [flag for flag, value in (("--sigma", config.sigma),
                                            ("--delta", config.delta),
                                            ("--eta", config.eta))
                   if value is None]
        if missing:
            raise ValueError(f"{', '.join(missing)} required for the "
                             f"contaminated beta-binomial")
        log_pmf = cbb_log_pmf(y, config.m, config.pi, config.sigma,
                              config.delta, config.eta)
        moments = cbb_moments(config.m, config.pi, config.sigma,
                              config.delta, config.eta)
        params = {"pi": config.pi, "sigma": config.sigma,
                  "delta": config.delta, "eta": config.eta}
    pmf = np.exp(log_pmf)
    if config.format == "json":
        payload = {"family": family, "m": config.m}
        payload.update(params)
        payload["pmf"] = [float(p) for p in pmf]
        payload["moments"] = {"mean": moments.mean,
                              "variance": moments.variance,
                              "skewness": moments.skewness,
                              "excess_kurtosis": moments.excess_kurtosis}
        _emit(json.dumps(payload, indent=2) + "\n", config.output)
        return 0
    lines = [f"family: {family}  " + "  ".join(f"{k}={v:g}"
                                               for k, v in params.items()),
             "y  probability"]
    for value, p in zip(y, pmf):
        lines.append(f"{value:<3d}{p:.12g}")
    lines.append(f"mean {moments.mean:.12g}  variance {moments.variance:.12g}  "
                 f"skewness {moments.skewness:.12g}  "
                 f"excess_kurtosis {moments.excess_kurtosis:.12g}")
    _emit("\n".join(lines) + "\n", config.output)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cbbreg",
        description="Bounded-count regression with a contamination-robust "
                    "mixture family.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    fit_p = sub.add_parser("fit", help="fit a model to a CSV file")
    fit_p.add_argument("--csv", required=True, dest="input",
                       help="input CSV path")
    fit_p.add_argument("--family", default="cbb",
                       help="b, bb, or cbb (default cbb)")
    fit_p.add_argument("--pi", default="~ 1", help="formula for pi, "
                       "e.g. 'y ~ x + state'")
    fit_p.add_argument("--sigma", default="~ 1", help="formula for sigma")
    fit_p.add_argument("--delta", default="~ 1", help="formula for delta")
    fit_p.add_argument("--eta", default="~ 1", help="formula for eta")
    fit_p.add_argument("--response", default=None,
                       help="response column (default: formula left-hand "
                            "side, else 'y')")
    fit_p.add_argument("--trials", default="m",
                       help="trials column name, or an integer constant")
    fit_p.add_argument("--delimiter", default=",")
    fit_p.add_argument("--no-header", action="store_false", dest="header")
    fit_p.add_argument("--compare", action="store_true",
                       help="also fit the nested families and rank them")
    fit_p.add_argument("--format", choices=("json", "table"), default="json")
    fit_p.add_argument("--output", default=None, help="write here instead "
                       "of stdout")
    fit_p.add_argument("--epsilon", type=float, default=1e-10)
    fit_p.add_argument("--max-iterations", type=int, default=1000,
                       dest="max_iterations")
    fit_p.add_argument("--optimizer", choices=("quasi_newton", "simplex"),
                       default="quasi_newton")
    fit_p.add_argument("--restarts", type=int, default=0)

    sim_p = sub.add_parser("simulate", help="run the contamination "
                           "sensitivity study")
    sim_p.add_argument("--n", type=int, default=500)
    sim_p.add_argument("--m", type=int, default=10)
    sim_p.add_argument("--beta0", type=float, default=2.0)
    sim_p.add_argument("--beta1", type=float, default=1.0)
    sim_p.add_argument("--fraction", "--fractions", dest="fractions",
                       type=float, nargs="+", default=[0.01, 0.05],
                       help="contamination fractions")
    sim_p.add_argument("--replications", type=int, default=1000)
    sim_p.add_argument("--seed", type=int, default=0)
    sim_p.add_argument("--format", choices=("json", "table"), default="table")
    sim_p.add_argument("--output", default=None)
    sim_p.add_argument("--epsilon", type=float, default=1e-10)
    sim_p.add_argument("--max-iterations", type=int, default=1000,
                       dest="max_iterations")
    sim_p.add_argument("--optimizer", choices=("quasi_newton", "simplex"),
                       default="quasi_newton")
    sim_p.add_argument("--restarts", type=int, default=0)

    dist_p = sub.add_parser("dist", help="print a PMF and its moments")
    dist_p.add_argument("--family", default="cbb")
    dist_p.add_argument("--m", type=int, required=True)
    dist_p.add_argument("--pi", type=float, required=True)
    dist_p.add_argument("--sigma", type=float, default=None)
    dist_p.add_argument("--delta", type=float, default=None)
    dist_p.add_argument("--eta", type=float, default=None)
    dist_p.add_argument("--format", choices=("json", "table"), default="table")
    dist_p.add_argument("--output", default=None)
    return parser


def _config_from_args(args: argparse.Namespace) -> CliConfig:
    config = CliConfig(subcommand=args.subcommand)
    if args.subcommand == "fit":
        config.input = args.input
        config.family = args.family
        config.formulas = {"pi": args.pi, "sigma": args.sigma,
                           "delta": args.delta, "eta": args.eta}
        config.response = args.response
        config.trials = args.trials
        config.delimiter = args.delimiter
        config.header = args.header
        config.compare = args.compare
        config.format = args.format
        config.output = args.output
        config.epsilon = args.epsilon
        config.max_iterations = args.max_iterations
        config.optimizer = args.optimizer
        config.restarts = args.restarts
    elif args.subcommand == "simulate":
        config.n = args.n
        config.m = args.m
        config.beta0 = args.beta0
        config.beta1 = args.beta1
        config.fractions = tuple(args.fractions)
        config.replications = args.replications
        config.seed = args.seed
        config.format = args.format
        config.output = args.output
        config.epsilon = args.epsilon
        config.max_iterations = args.max_iterations
        config.optimizer = args.optimizer
        config.restarts = args.restarts
    else:
        config.family = args.family
        config.m = args.m
        config.pi = args.pi
        config.sigma = args.sigma
        config.delta = args.delta
        config.eta = args.eta
        config.format = args.format
        config.output = args.output
    return config


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    config = _config_from_args(args)
    handlers = {"fit": cmd_fit, "simulate": cmd_simulate, "dist": cmd_dist}
    try:
        return handlers[config.subcommand](config)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
