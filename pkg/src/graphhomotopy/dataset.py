from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np


@dataclass(frozen=True, eq=False)
class Dataset:
    """``n`` observations (rows) of ``d`` variables (columns)."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64)
        if v.ndim != 2:
            raise ValueError(f"dataset must be 2-D, got shape {v.shape}")
        if v.shape[0] < 2:
            raise ValueError("dataset needs at least two observations")
        if not np.all(np.isfinite(v)):
            raise ValueError("dataset has non-finite entries")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]

    @cached_property
    def means(self) -> np.ndarray:
        return self.values.mean(axis=0)

    def rows(self, idx) -> "Dataset":
        return Dataset(self.values[idx])

    def columns(self, idx) -> np.ndarray:
        return self.values[:, idx]


def as_dataset(data) -> Dataset:
    return data if isinstance(data, Dataset) else Dataset(data)
