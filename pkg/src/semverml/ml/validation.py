"""Cross-validation protocol: stratified folds, within/dimension/cross
evaluation, and one-vs-rest prediction.

Resampling only ever touches training rows; test folds stay untouched and
an id audit confirms no test row leaks into any resampled training set.
Folds where the test labels collapse to a single class have no defined
ROC-AUC: they are excluded from the fold mean and surfaced through
``n_excluded`` rather than imputed.

All randomness (shuffling, SMOTE, forests) derives from one master seed,
so every result replays bit-identically.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import SingleClassTest
from ..features import Dataset
from .data import BinaryDataset, binarize, project_dimension
from .metrics import roc_auc
from .models import train_model
from .resample import smote


def stratified_kfold(labels, k: int = 5, seed: int = 0
                     ) -> tuple[list[np.ndarray], str | None]:
    """Disjoint covering folds with per-class counts within 1 of even.

    Rows of each class are shuffled with the seeded generator and dealt
    round-robin; the starting fold rotates per class so remainders spread
    out. A class smaller than *k* is still dealt round-robin, with a
    warning.
    """
    labels = np.asarray(labels)
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 3]))
    folds: list[list[int]] = [[] for _ in range(k)]
    warning = None
    classes = sorted(np.unique(labels).tolist())
    for ci, cls in enumerate(classes):
        idx = np.nonzero(labels == cls)[0]
        if len(idx) < k:
            warning = (f"class {cls!r} has {len(idx)} rows for {k} folds; "
                       "dealt round-robin")
        rng.shuffle(idx)
        for pos, row in enumerate(idx.tolist()):
            folds[(pos + ci) % k].append(row)
    return [np.array(sorted(f), dtype=np.int64) for f in folds], warning


@dataclass
class FoldResult:
    """Per-fold AUCs for one (dataset, algorithm, target) evaluation."""

    algorithm: str
    target: str
    fold_aucs: list[float | None]
    n_excluded: int
    seed: int
    warnings: list[str] = field(default_factory=list)

    @property
    def mean_auc(self) -> float:
        vals = [a for a in self.fold_aucs if a is not None]
        return float(np.mean(vals)) if vals else float("nan")


def _fit_and_score(train: BinaryDataset, test: BinaryDataset,
                   algorithm: str, smote_k: int, fold_seed: int,
                   warnings: list[str]) -> float | None:
    if len(np.unique(test.y)) < 2:
        return None
    if len(np.unique(train.y)) < 2:
        # nothing can be learned from one class; excluded like an
        # undefined test fold so every algorithm averages the same folds
        warnings.append("single-class training split; fold excluded")
        return None
    resampled, warn = smote(train, k=smote_k, seed=fold_seed)
    if warn:
        warnings.append(warn)
    test_ids = set(test.ids)
    leaked = test_ids.intersection(resampled.ids)
    if leaked:
        raise AssertionError(f"test rows leaked into training: "
                             f"{sorted(leaked)[:5]}")
    model = train_model(algorithm, resampled, seed=fold_seed)
    try:
        return float(roc_auc(model.predict_scores(test.X), test.y))
    except SingleClassTest:
        return None


def _child_seed(seed: int, salt: int, index: int) -> int:
    state = np.random.SeedSequence([int(seed), salt, index]).generate_state(1)
    return int(state[0])


def _cv(bds: BinaryDataset, algorithm: str, target: str, k: int, seed: int,
        smote_k: int, repeats: int = 1) -> FoldResult:
    warnings: list[str] = []
    fold_aucs: list[float | None] = []
    all_idx = np.arange(len(bds))
    pass_seeds = [seed] + [_child_seed(seed, 40, r)
                           for r in range(1, repeats)]
    for pass_seed in pass_seeds:
        folds, fold_warn = stratified_kfold(bds.y, k=k, seed=pass_seed)
        if fold_warn and fold_warn not in warnings:
            warnings.append(fold_warn)
        for fi, test_idx in enumerate(folds):
            if len(test_idx) == 0:
                fold_aucs.append(None)
                continue
            mask = np.ones(len(bds), dtype=bool)
            mask[test_idx] = False
            train = bds.take(all_idx[mask])
            test = bds.take(test_idx)
            fold_aucs.append(_fit_and_score(
                train, test, algorithm, smote_k,
                _child_seed(pass_seed, 10, fi), warnings))
    return FoldResult(algorithm=algorithm, target=target,
                      fold_aucs=fold_aucs,
                      n_excluded=sum(a is None for a in fold_aucs),
                      seed=seed, warnings=warnings)


def evaluate_within(ds: Dataset, algorithm: str, target: str, k: int = 5,
                    seed: int = 0, smote_k: int = 5,
                    repeats: int = 1) -> FoldResult:
    """Stratified k-fold within one package; mean AUC over defined folds.

    One pass by default; *repeats* reruns the whole k-fold split with
    derived seeds and pools the fold AUCs.
    """
    return _cv(binarize(ds, target), algorithm, target, k, seed, smote_k,
               repeats)


def evaluate_dimension(ds: Dataset, dimension: str, algorithm: str,
                       target: str, k: int = 5, seed: int = 0,
                       smote_k: int = 5, repeats: int = 1) -> FoldResult:
    """Same protocol with features projected onto one dimension."""
    bds = project_dimension(binarize(ds, target), dimension)
    return _cv(bds, algorithm, target, k, seed, smote_k, repeats)


@dataclass
class CrossResult:
    algorithm: str
    target: str
    per_package: dict[str, float | None]
    n_excluded: int
    seed: int
    warnings: list[str] = field(default_factory=list)

    @property
    def mean_auc(self) -> float:
        vals = [a for a in self.per_package.values() if a is not None]
        return float(np.mean(vals)) if vals else float("nan")


def evaluate_cross(package_datasets: dict[str, Dataset], algorithm: str,
                   target: str, seed: int = 0, smote_k: int = 5
                   ) -> CrossResult:
    """Leave-one-package-out: train on the rest, test on the held-out one.

    SMOTE applies to the pooled training rows only; the held-out package is
    never resampled. Packages evaluate in sorted-name order with seeds
    derived per package, so results replay exactly.
    """
    names = sorted(package_datasets)
    per_package: dict[str, float | None] = {}
    warnings: list[str] = []
    for pi, name in enumerate(names):
        held = package_datasets[name]
        pool_rows = [row for other in names if other != name
                     for row in package_datasets[other].rows]
        pool = Dataset(packages=[n for n in names if n != name],
                       rows=pool_rows)
        train = binarize(pool, target)
        test = binarize(held, target)
        per_package[name] = _fit_and_score(
            train, test, algorithm, smote_k,
            _child_seed(seed, 20, pi), warnings)
    return CrossResult(algorithm=algorithm, target=target,
                       per_package=per_package,
                       n_excluded=sum(v is None for v in per_package.values()),
                       seed=seed, warnings=warnings)


OVR_ORDER = ("major", "minor", "patch")


def ovr_predict(models: dict[str, object], feature_vector
                ) -> tuple[dict[str, float], str, bool]:
    """Scores from the three one-vs-rest models plus the argmax type.

    Ties resolve in the order major > minor > patch and set the tie flag.
    """
    missing = [t for t in OVR_ORDER if t not in models]
    if missing:
        raise KeyError(f"missing one-vs-rest models for: {', '.join(missing)}")
    scores = {t: models[t].predict_one(feature_vector) for t in OVR_ORDER}
    best = max(scores.values())
    winners = [t for t in OVR_ORDER if scores[t] == best]
    return scores, winners[0], len(winners) > 1
