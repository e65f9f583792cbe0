"""Bounded-count datasets and design-matrix construction.

A Dataset holds the response counts y, per-row trial counts m (allowed to
vary across rows), and named covariate columns.  Covariate columns are
either numeric (float) or categorical (strings); categorical columns are
expanded into reference-coded indicators when a design matrix is built,
with the first level in sorted order as the reference.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

INTERCEPT_NAME = "intercept"


def _is_categorical(column: np.ndarray) -> bool:
    return column.dtype.kind not in "fiub"


@dataclass
class Dataset:
    """Counts y out of m trials with named covariate columns."""

    y: np.ndarray
    m: np.ndarray
    columns: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.y = np.asarray(self.y)
        self.m = np.asarray(self.m)
        if self.y.ndim != 1:
            raise ValueError("y must be one-dimensional")
        if self.y.size == 0:
            raise ValueError("dataset is empty")
        if self.m.ndim == 0:
            self.m = np.full(self.y.shape, self.m)
        if self.m.shape != self.y.shape:
            raise ValueError("y and m must have the same length")
        if np.any(self.y != np.floor(self.y)) or np.any(self.m != np.floor(self.m)):
            raise ValueError("y and m must be integers")
        self.y = self.y.astype(np.int64)
        self.m = self.m.astype(np.int64)
        if np.any(self.m < 1):
            raise ValueError("m must be >= 1 for every row")
        if np.any(self.y < 0) or np.any(self.y > self.m):
            raise ValueError("every row must satisfy 0 <= y <= m")
        clean = {}
        for name, col in self.columns.items():
            arr = np.asarray(col)
            if arr.shape != self.y.shape:
                raise ValueError(f"column {name!r} length does not match y")
            if _is_categorical(arr):
                arr = arr.astype(str)
            else:
                arr = arr.astype(float)
                if not np.all(np.isfinite(arr)):
                    raise ValueError(f"column {name!r} contains non-finite values")
            clean[str(name)] = arr
        self.columns = clean

    @property
    def n(self) -> int:
        return int(self.y.size)

    def subset(self, index) -> "Dataset":
        """Rows selected by an index array; metadata is not carried over."""
        return Dataset(y=self.y[index], m=self.m[index],
                       columns={k: v[index] for k, v in self.columns.items()})


def design_matrix(data: Dataset, terms) -> tuple[np.ndarray, list]:
    """Build an n x (1 + p) design matrix for the given covariate terms.

    The first column is the intercept.  Numeric terms contribute one
    column each; categorical terms contribute one indicator column per
    non-reference level (levels sorted, first is the reference).

    Returns the matrix and the expanded column names.
    """
    parts = [np.ones((data.n, 1))]
    names = [INTERCEPT_NAME]
    for term in terms:
        if term not in data.columns:
            available = ", ".join(sorted(data.columns)) or "(none)"
            raise ValueError(f"unknown covariate {term!r}; available: {available}")
        col = data.columns[term]
        if _is_categorical(col):
            levels = sorted(set(col.tolist()))
            for level in levels[1:]:
                parts.append((col == level).astype(float)[:, None])
                names.append(f"{term}[{level}]")
        else:
            parts.append(col[:, None])
            names.append(term)
    return np.hstack(parts), names
