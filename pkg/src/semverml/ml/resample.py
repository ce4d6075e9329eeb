"""Synthetic minority oversampling (SMOTE)."""

from __future__ import annotations

import numpy as np

from .data import BinaryDataset


def smote(ds: BinaryDataset, k: int = 5, target_ratio: float = 1.0,
          seed: int = 0) -> tuple[BinaryDataset, str | None]:
    """Oversample the minority class by interpolating toward neighbors.

    Each synthetic row is ``x_i + u * (x_nn - x_i)`` with ``u ~ U(0, 1)``
    and ``x_nn`` one of the k Euclidean-nearest minority rows (k capped at
    minority_count - 1). Rows are appended until the minority count reaches
    ``target_ratio`` times the majority count; the original rows are kept
    verbatim and synthetic rows get fresh ``smote-<n>`` ids.

    Already-balanced input comes back unchanged. A minority class smaller
    than two rows cannot be interpolated: resampling is skipped and the
    warning slot says so.
    """
    y = ds.y
    n1 = int((y == 1).sum())
    n0 = len(y) - n1
    if n0 == 0 or n1 == 0:
        return ds, "single-class input; resampling skipped"
    minority_label = 1 if n1 < n0 else 0
    n_min, n_maj = (n1, n0) if minority_label == 1 else (n0, n1)
    n_target = int(round(target_ratio * n_maj))
    n_new = n_target - n_min
    if n_new <= 0:
        return ds, None
    if n_min < 2:
        return ds, ("minority class has fewer than 2 rows; "
                    "resampling skipped")

    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 2]))
    min_idx = np.nonzero(y == minority_label)[0]
    Xm = ds.X[min_idx]
    k_eff = min(k, n_min - 1)

    # k nearest minority neighbors per minority row, self excluded
    d2 = ((Xm[:, None, :] - Xm[None, :, :]) ** 2).sum(axis=2)
    np.fill_diagonal(d2, np.inf)
    neighbors = np.argsort(d2, axis=1, kind="stable")[:, :k_eff]

    base = rng.integers(0, n_min, size=n_new)
    pick = rng.integers(0, k_eff, size=n_new)
    u = rng.random(n_new)
    x_i = Xm[base]
    x_nn = Xm[neighbors[base, pick]]
    synth = x_i + u[:, None] * (x_nn - x_i)

    X_out = np.vstack([ds.X, synth])
    y_out = np.concatenate([y, np.full(n_new, minority_label, dtype=y.dtype)])
    ids_out = list(ds.ids) + [f"smote-{i}" for i in range(n_new)]
    return BinaryDataset(X=X_out, y=y_out, ids=ids_out,
                         feature_names=ds.feature_names), None
