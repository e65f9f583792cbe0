"""CSV ingestion and report serialization.

Reading goes through a CsvSchema naming the response and trials columns
(trials may instead be a constant shared by every row).  Covariate columns
are typed by inspection: a column where every value parses as a decimal
number becomes numeric, anything else stays categorical.  Parse problems
are reported with their 1-based line number and no partially built dataset
ever escapes.

Reports serialize either as JSON (stable key order, full-precision floats,
so a written log-likelihood parses back bit-exactly) or as a plain-text
table with one "estimate (SE)" pair per coefficient.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .inference import InferenceReport
from .regression import FitResult

_RESPONSE_OUT = "y"
_TRIALS_OUT = "m"


@dataclass(frozen=True)
class CsvSchema:
    """Where to find the response, trials, and covariates in a CSV file.

    ``trials_column`` is either a column name or an integer constant used
    as the trial count for every row.  With ``header=False`` columns are
    addressed by zero-based position written as a string ("0", "1", ...).
    """

    response_column: str = "y"
    trials_column: str | int = "m"
    covariate_columns: tuple = ()
    delimiter: str = ","
    header: bool = True

    def __post_init__(self):
        if not self.response_column:
            raise ValueError("response_column must be a column name")
        if isinstance(self.trials_column, bool) or (
                isinstance(self.trials_column, int) and self.trials_column < 1):
            raise ValueError("a constant trials_column must be a positive integer")
        object.__setattr__(self, "covariate_columns",
                           tuple(self.covariate_columns))
        if len(self.delimiter) != 1:
            raise ValueError("delimiter must be a single character")
        named = {self.response_column}
        if isinstance(self.trials_column, str):
            if self.trials_column == self.response_column:
                raise ValueError("response and trials columns must differ")
            named.add(self.trials_column)
        overlap = named.intersection(self.covariate_columns)
        if overlap:
            raise ValueError(f"covariate columns overlap response/trials: "
                             f"{sorted(overlap)}")
        if len(set(self.covariate_columns)) != len(self.covariate_columns):
            raise ValueError("covariate_columns contains duplicates")


def _column_index(name: str, header_map: dict, path: str) -> int:
    if name not in header_map:
        raise ValueError(f"{path}: column {name!r} not found; available: "
                         f"{sorted(header_map)}")
    return header_map[name]


def _cell(row: list, index: int, name: str, line: int, path: str) -> str:
    if index >= len(row):
        raise ValueError(f"{path}, line {line}: too few fields "
                         f"(column {name!r} missing)")
    value = row[index].strip()
    if not value:
        raise ValueError(f"{path}, line {line}: missing value in column {name!r}")
    return value


def _parse_count(text: str, name: str, line: int, path: str) -> int:
    try:
        value = float(text)
    except ValueError:
        raise ValueError(f"{path}, line {line}: column {name!r} has "
                         f"non-numeric value {text!r}") from None
    if not math.isfinite(value) or value != int(value):
        raise ValueError(f"{path}, line {line}: column {name!r} must be an "
                         f"integer, got {text!r}")
    return int(value)


def read_dataset(path: str, schema: CsvSchema) -> Dataset:
    """Read a CSV file into a validated Dataset.

    Every reported problem names the offending line.  The first data row
    fixes the expected field count; rows are validated one at a time
    (integer response and trials, 0 <= y <= m) before the dataset is built.
    """
    path = str(path)
    y_values: list = []
    m_values: list = []
    raw_columns: dict = {name: [] for name in schema.covariate_columns}
    line_numbers: list = []
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle, delimiter=schema.delimiter)
        if schema.header:
            try:
                header_row = next(reader)
            except StopIteration:
                raise ValueError(f"{path}: file is empty") from None
            names = [cell.strip() for cell in header_row]
            referenced = [schema.response_column, *schema.covariate_columns]
            if isinstance(schema.trials_column, str):
                referenced.append(schema.trials_column)
            for name in referenced:
                if names.count(name) > 1:
                    raise ValueError(f"{path}: column {name!r} appears "
                                     f"{names.count(name)} times in the header")
            header_map = {name: i for i, name in enumerate(names)}
        else:
            header_map = None
        y_index = m_index = None
        covariate_indices = None
        for row in reader:
            if not row or all(not cell.strip() for cell in row):
                continue
            line = reader.line_num
            if header_map is None:
                header_map = {str(i): i for i in range(len(row))}
            if y_index is None:
                y_index = _column_index(schema.response_column, header_map, path)
                if isinstance(schema.trials_column, str):
                    m_index = _column_index(schema.trials_column, header_map, path)
                covariate_indices = {
                    name: _column_index(name, header_map, path)
                    for name in schema.covariate_columns}
            y_text = _cell(row, y_index, schema.response_column, line, path)
            y = _parse_count(y_text, schema.response_column, line, path)
            if isinstance(schema.trials_column, int):
                m = schema.trials_column
            else:
                m_text = _cell(row, m_index, schema.trials_column, line, path)
                m = _parse_count(m_text, schema.trials_column, line, path)
            if m < 1:
                raise ValueError(f"{path}, line {line}: trials must be at "
                                 f"least 1, got {m}")
            if y < 0 or y > m:
                raise ValueError(f"{path}, line {line}: response {y} outside "
                                 f"0..{m}")
            y_values.append(y)
            m_values.append(m)
            line_numbers.append(line)
            for name, index in covariate_indices.items():
                raw_columns[name].append(_cell(row, index, name, line, path))
    if not y_values:
        raise ValueError(f"{path}: no data rows")
    columns = {name: _type_column(values, name, line_numbers, path)
               for name, values in raw_columns.items()}
    return Dataset(y=np.array(y_values), m=np.array(m_values),
                   columns=columns, meta={"path": path})


def _type_column(values: list, name: str, line_numbers: list, path: str):
    """Numeric if the whole column parses as finite decimals, else text."""
    parsed = []
    for value, line in zip(values, line_numbers):
        try:
            number = float(value)
        except ValueError:
            return np.array(values, dtype=object)
        if not math.isfinite(number):
            raise ValueError(f"{path}, line {line}: column {name!r} has "
                             f"non-finite value {value!r}")
        parsed.append(number)
    return np.array(parsed)


def write_dataset(data: Dataset, path: str, delimiter: str = ",") -> None:
    """Write a dataset back to CSV with columns y, m, then covariates.

    Floats use shortest-round-trip formatting, so reading the file back
    reproduces the original values exactly.
    """
    path = str(path)
    reserved = {_RESPONSE_OUT, _TRIALS_OUT}.intersection(data.columns)
    if reserved:
        raise ValueError(f"covariate names collide with output columns: "
                         f"{sorted(reserved)}")
    names = list(data.columns)
    try:
        handle = open(path, "w", newline="", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write dataset to {path}: {exc}") from exc
    with handle:
        writer = csv.writer(handle, delimiter=delimiter)
        writer.writerow([_RESPONSE_OUT, _TRIALS_OUT, *names])
        for i in range(data.n):
            row = [int(data.y[i]), int(data.m[i])]
            for name in names:
                value = data.columns[name][i]
                row.append(repr(float(value)) if not isinstance(value, str)
                           else value)
            writer.writerow(row)


def _weight_summary(weights: np.ndarray) -> dict:
    w = np.asarray(weights, dtype=float)
    if w.size == 0:
        return {"min": 0.0, "mean": 0.0, "max": 0.0, "count_above_half": 0}
    return {"min": float(np.min(w)), "mean": float(np.mean(w)),
            "max": float(np.max(w)),
            "count_above_half": int(np.sum(w > 0.5))}


def report_payload(fit: FitResult, report: InferenceReport) -> dict:
    """The JSON-ready dictionary behind write_report."""
    ses = report.standard_errors
    return {
        "coefficients": {name: float(value) for name, value in
                         zip(report.parameter_names, report.estimates)},
        "standard_errors": None if ses is None else {
            name: float(value) for name, value in
            zip(report.parameter_names, ses)},
        "log_likelihood": float(fit.log_likelihood),
        "aic": float(report.aic),
        "bic": float(report.bic),
        "hqic": float(report.hqic),
        "iterations": int(fit.iterations),
        "converged": bool(fit.converged),
        "hessian_ok": bool(report.hessian_ok),
        "se_unreliable": bool(report.unreliable),
        "posterior_weights": _weight_summary(fit.posterior_weights),
    }


def format_report_table(fit: FitResult, report: InferenceReport) -> str:
    """Plain-text report: one 'estimate (SE)' pair per coefficient."""
    ses = report.standard_errors
    width = max(len(name) for name in report.parameter_names)
    lines = [f"{'coefficient':<{width}}  estimate (SE)"]
    for i, name in enumerate(report.parameter_names):
        se = "n/a" if ses is None else f"{ses[i]:.3f}"
        lines.append(f"{name:<{width}}  {report.estimates[i]:.3f} ({se})")
    if report.unreliable:
        lines.append("note: a linear predictor is saturated; treat the "
                     "standard errors with suspicion")
    lines.append(f"log-likelihood  {fit.log_likelihood:.3f}")
    lines.append(f"AIC {report.aic:.3f}  BIC {report.bic:.3f}  "
                 f"HQIC {report.hqic:.3f}")
    lines.append(f"converged {'yes' if fit.converged else 'no'} "
                 f"after {fit.iterations} iterations")
    w = _weight_summary(fit.posterior_weights)
    lines.append(f"posterior weights  min {w['min']:.3f}  mean {w['mean']:.3f}"
                 f"  max {w['max']:.3f}  above 0.5: {w['count_above_half']}")
    return "\n".join(lines) + "\n"


def write_report(fit: FitResult, report: InferenceReport, path,
                 format: str = "json") -> None:
    """Serialize a fitted model and its inference summary.

    ``path`` may be a filesystem path or an open text stream.  ``format``
    is "json" or "table".
    """
    if format == "json":
        text = json.dumps(report_payload(fit, report), indent=2) + "\n"
    elif format == "table":
        text = format_report_table(fit, report)
    else:
        raise ValueError("format must be 'json' or 'table'")
    if hasattr(path, "write"):
        path.write(text)
        return
    try:
        with open(str(path), "w", encoding="utf-8") as handle:
            handle.write(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc
