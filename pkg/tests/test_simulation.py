"""Contamination sensitivity study harness."""

import math

import numpy as np
import pytest

from cbbreg.data import Dataset
from cbbreg.simulation import (
    StudyConfig,
    contaminate,
    generate_binomial_data,
    run_sensitivity_study,
)

SMALL = StudyConfig(n=60, m=8, beta=(1.0, 0.5), fractions=(0.0, 0.1),
                    replications=3, seed=42)


@pytest.fixture(scope="module")
def small_report():
    return run_sensitivity_study(SMALL)


def test_config_validation():
    with pytest.raises(ValueError):
        StudyConfig(n=1)
    with pytest.raises(ValueError):
        StudyConfig(m=0)
    with pytest.raises(ValueError):
        StudyConfig(beta=(1.0,))
    with pytest.raises(ValueError):
        StudyConfig(fractions=(0.5, 1.5))
    with pytest.raises(ValueError):
        StudyConfig(replications=0)


def test_generate_binomial_data_shapes_and_ranges():
    rng = np.random.default_rng(5)
    data = generate_binomial_data(SMALL, rng)
    assert data.n == 60
    assert set(data.columns) == {"x"}
    assert np.all((data.columns["x"] >= 0.0) & (data.columns["x"] <= 1.0))
    assert np.all((data.y >= 0) & (data.y <= 8))


def test_contaminate_replaces_requested_count():
    rng = np.random.default_rng(6)
    data = generate_binomial_data(SMALL, rng)
    noisy = contaminate(data, 0.1, np.random.default_rng(7))
    rows = noisy.meta["contaminated_rows"]
    assert len(rows) == math.ceil(0.1 * 60)
    assert rows == sorted(rows)
    assert len(set(rows)) == len(rows)
    untouched = np.setdiff1d(np.arange(60), rows)
    assert np.array_equal(noisy.y[untouched], data.y[untouched])
    assert np.all((noisy.y >= 0) & (noisy.y <= 8))


def test_contaminate_zero_fraction_is_identity():
    rng = np.random.default_rng(8)
    data = generate_binomial_data(SMALL, rng)
    copy = contaminate(data, 0.0, np.random.default_rng(9))
    assert copy.meta["contaminated_rows"] == []
    assert np.array_equal(copy.y, data.y)


def test_contaminate_validates_fraction():
    data = Dataset(y=np.array([1, 2]), m=5, columns={})
    with pytest.raises(ValueError):
        contaminate(data, 1.5, np.random.default_rng(0))


def test_study_is_deterministic(small_report):
    again = run_sensitivity_study(SMALL)
    assert again.to_dict() == small_report.to_dict()


def test_study_covers_all_cells(small_report):
    families = ("binomial", "beta_binomial", "contaminated_beta_binomial")
    assert len(small_report.cells) == len(SMALL.fractions) * len(families)
    for fraction in SMALL.fractions:
        for family in families:
            cell = small_report.cell(fraction, family)
            assert cell.n_fits + cell.n_failed == SMALL.replications
            assert cell.n_fits >= 1
            assert len(cell.bias) == 2
            assert len(cell.mse) == 2
            assert all(np.isfinite(cell.bias))
            assert all(v >= 0.0 for v in cell.mse)


def test_mse_dominates_squared_bias(small_report):
    for cell in small_report.cells:
        for b, v in zip(cell.bias, cell.mse):
            assert v >= b * b - 1e-12


def test_missing_cell_raises(small_report):
    with pytest.raises(KeyError):
        small_report.cell(0.37, "binomial")


def test_to_dict_round_trips_config(small_report):
    payload = small_report.to_dict()
    assert payload["config"]["n"] == 60
    assert payload["config"]["seed"] == 42
    assert payload["config"]["fractions"] == [0.0, 0.1]
    assert {c["family"] for c in payload["cells"]} == {
        "binomial", "beta_binomial", "contaminated_beta_binomial"}
