"""Ranking metric and the nonparametric comparison statistics.

ROC-AUC is computed as the rank statistic (ties count half), which equals
the trapezoidal area under the ROC curve. The Mann-Whitney test uses the
exact permutation distribution for small tie-free samples and a
tie-corrected normal approximation with continuity correction otherwise.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from ..errors import (
    DivisionByZeroBaseline,
    EmptySample,
    SingleClassTest,
)


def _midranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks; tied values share the mean of their rank range."""
    order = np.argsort(values, kind="mergesort")
    sorted_vals = values[order]
    ranks = np.empty(len(values), dtype=np.float64)
    i = 0
    n = len(values)
    while i < n:
        j = i
        while j + 1 < n and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def roc_auc(scores, labels) -> float:
    """Probability a random positive outscores a random negative.

    Raises SingleClassTest when *labels* has only one class; callers in the
    cross-validation loop exclude such folds instead of imputing a value.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    pos = labels == 1
    n_pos = int(pos.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClassTest("labels contain a single class")
    ranks = _midranks(scores)
    r_pos = float(ranks[pos].sum())
    return (r_pos - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


@lru_cache(maxsize=None)
def _u_counts(n1: int, n2: int) -> tuple[int, ...]:
    """Exact null distribution of U: counts over u = 0 .. n1*n2."""
    if n1 == 0 or n2 == 0:
        return (1,)
    shifted = _u_counts(n1 - 1, n2)   # largest value comes from sample 1
    same = _u_counts(n1, n2 - 1)      # largest value comes from sample 2
    size = n1 * n2 + 1
    out = []
    for u in range(size):
        total = 0
        if 0 <= u - n2 < len(shifted):
            total += shifted[u - n2]
        if u < len(same):
            total += same[u]
        out.append(total)
    return tuple(out)


_EXACT_LIMIT = 12


def mann_whitney(a, b) -> tuple[float, float]:
    """Two-sided Mann-Whitney test; returns (U for *a*, p-value).

    U counts pairs where an *a* value exceeds a *b* value (ties half). The
    exact distribution is used when the pooled sample has at most 12
    tie-free values; otherwise the normal approximation applies with tie
    correction and a 0.5 continuity correction.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    n1, n2 = len(a), len(b)
    if n1 == 0 or n2 == 0:
        raise EmptySample("both samples must be non-empty")
    pooled = np.concatenate([a, b])
    ranks = _midranks(pooled)
    r1 = float(ranks[:n1].sum())
    u1 = r1 - n1 * (n1 + 1) / 2.0
    u2 = n1 * n2 - u1
    has_ties = len(np.unique(pooled)) != n1 + n2

    if not has_ties and n1 + n2 <= _EXACT_LIMIT:
        counts = _u_counts(n1, n2)
        total = sum(counts)
        u_lo = int(round(min(u1, u2)))
        cum = sum(counts[:u_lo + 1])
        return u1, min(1.0, 2.0 * cum / total)

    n = n1 + n2
    _, tie_sizes = np.unique(pooled, return_counts=True)
    tie_term = float(np.sum(tie_sizes.astype(np.float64) ** 3 - tie_sizes))
    var = n1 * n2 / 12.0 * ((n + 1) - tie_term / (n * (n - 1)))
    if var <= 0:
        return u1, 1.0
    mu = n1 * n2 / 2.0
    diff = u1 - mu
    if diff == 0:
        return u1, 1.0
    z = (diff - math.copysign(0.5, diff)) / math.sqrt(var)
    p = math.erfc(abs(z) / math.sqrt(2.0))
    return u1, min(1.0, max(0.0, p))


def cliffs_magnitude(d: float) -> str:
    """Effect-size label for a delta value: small, medium, or large."""
    size = abs(d)
    if size < 0.33:
        return "small"
    if size < 0.474:
        return "medium"
    return "large"


def cliffs_delta(a, b) -> tuple[float, str]:
    """Cliff's delta in [-1, 1] plus its magnitude label."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if len(a) == 0 or len(b) == 0:
        raise EmptySample("both samples must be non-empty")
    sign = np.sign(a[:, None] - b[None, :])
    d = float(sign.sum()) / (len(a) * len(b))
    return d, cliffs_magnitude(d)


def relative_auc(model_auc: float, baseline_auc: float) -> float:
    """Ratio of a model's ROC-AUC to the baseline's."""
    if baseline_auc == 0:
        raise DivisionByZeroBaseline("baseline ROC-AUC is zero")
    return model_auc / baseline_auc
