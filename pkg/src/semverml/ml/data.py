"""Binary one-vs-rest datasets over the canonical feature matrix."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import SchemaMismatch
from ..features import DIMENSIONS, FEATURE_NAMES, Dataset


@dataclass
class BinaryDataset:
    """Feature matrix with 0/1 targets for one one-vs-rest task.

    Row ids travel with the data so resampled training sets can be audited
    against test folds; rows synthesized by SMOTE get fresh ids.
    """

    X: np.ndarray               # (n, d) float64
    y: np.ndarray               # (n,) int8
    ids: list[str]
    feature_names: tuple[str, ...]

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.int8)
        if self.X.ndim != 2 or len(self.X) != len(self.y):
            raise ValueError("X must be 2-D with one row per label")
        if len(self.ids) != len(self.y):
            raise ValueError("one id per row required")
        if self.X.size and not np.isfinite(self.X).all():
            raise ValueError("non-finite feature values")

    def __len__(self) -> int:
        return len(self.y)

    def take(self, idx) -> "BinaryDataset":
        idx = np.asarray(idx)
        return BinaryDataset(self.X[idx], self.y[idx],
                             [self.ids[i] for i in idx], self.feature_names)


def binarize(ds: Dataset, target: str) -> BinaryDataset:
    """One-vs-rest view of a dataset: 1 where the label equals *target*."""
    X = np.array([row.as_row() for row in ds.rows], dtype=np.float64)
    if X.size == 0:
        X = X.reshape(0, len(FEATURE_NAMES))
    y = np.array([1 if row.label == target else 0 for row in ds.rows],
                 dtype=np.int8)
    ids = [row.release_id for row in ds.rows]
    return BinaryDataset(X=X, y=y, ids=ids, feature_names=FEATURE_NAMES)


def project_dimension(bds: BinaryDataset, dimension: str) -> BinaryDataset:
    """Keep only one dimension's columns; 'all' is the identity."""
    if dimension == "all":
        return bds
    if dimension not in DIMENSIONS:
        raise SchemaMismatch(f"unknown dimension {dimension!r}")
    names = DIMENSIONS[dimension]
    cols = [bds.feature_names.index(n) for n in names]
    return BinaryDataset(X=bds.X[:, cols], y=bds.y, ids=list(bds.ids),
                         feature_names=tuple(names))
