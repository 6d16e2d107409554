"""Shared container for node feature matrices with named columns."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

__all__ = ["FeatureMatrix"]


@dataclass(frozen=True)
class FeatureMatrix:
    """Dense n x F real matrix, one row per node, with column labels."""

    values: np.ndarray
    columns: tuple[str, ...]

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "columns", tuple(self.columns))
        if values.ndim != 2:
            raise ValidationError("feature matrix must be 2-d")
        if values.shape[1] != len(self.columns):
            raise ValidationError("column labels must align with columns")
        if not np.all(np.isfinite(values)):
            raise ValidationError("feature values must be finite")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def num_features(self) -> int:
        return self.values.shape[1]

    def column(self, name: str) -> np.ndarray:
        try:
            return self.values[:, self.columns.index(name)]
        except ValueError:
            raise ValidationError(f"no column named {name!r}") from None

    def with_transform(self, fn, suffix: str = "") -> "FeatureMatrix":
        cols = tuple(c + suffix for c in self.columns)
        return FeatureMatrix(fn(self.values), cols)
