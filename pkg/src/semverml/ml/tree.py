"""CART-style binary tree growing shared by the tree, forest, and boosting
models.

Splits are exhaustive over midpoint thresholds. Ties resolve to the lowest
feature index, then the lowest threshold, so training is deterministic for
a fixed feature-subset sequence. Trees are plain nested dicts
(``{"f", "t", "l", "r"}`` internal, ``{"v"}`` leaf) so they serialize to
JSON unchanged.
"""

from __future__ import annotations

import numpy as np


def _best_split(Xsub: np.ndarray, t: np.ndarray, min_leaf: int,
                criterion: str, aux: np.ndarray | None = None,
                lam: float = 1.0):
    """Best (column, threshold) in *Xsub* or None when nothing valid.

    criterion 'gini' treats *t* as 0/1 labels and minimizes weighted child
    impurity; 'mse' treats *t* as regression targets and minimizes summed
    child squared error; 'gain' treats *t* as gradients and *aux* as
    hessians and maximizes the second-order structure score
    ``G_L^2/(H_L+lam) + G_R^2/(H_R+lam)``. Columns are assumed ordered by
    ascending global feature index so the first tied column wins.
    """
    m, d = Xsub.shape
    if m < 2 * min_leaf or m < 2 or d == 0:
        return None
    order = np.argsort(Xsub, axis=0, kind="stable")
    xs = np.take_along_axis(Xsub, order, axis=0)
    ts = t[order]
    nl = np.arange(1, m, dtype=np.float64)[:, None]
    nr = float(m) - nl
    if criterion == "gini":
        pos = np.cumsum(ts, axis=0)[:-1]
        tot = ts.sum(axis=0)
        posr = tot - pos
        wl = nl - (pos * pos + (nl - pos) * (nl - pos)) / nl
        wr = nr - (posr * posr + (nr - posr) * (nr - posr)) / nr
        score = wl + wr
    elif criterion == "mse":
        s = np.cumsum(ts, axis=0)[:-1]
        s2 = np.cumsum(ts * ts, axis=0)[:-1]
        stot = ts.sum(axis=0)
        s2tot = (ts * ts).sum(axis=0)
        score = (s2 - s * s / nl) + ((s2tot - s2) - (stot - s) ** 2 / nr)
    elif criterion == "gain":
        hs = aux[order]
        gl = np.cumsum(ts, axis=0)[:-1]
        hl = np.cumsum(hs, axis=0)[:-1]
        gtot = ts.sum(axis=0)
        htot = hs.sum(axis=0)
        score = -(gl * gl / (hl + lam)
                  + (gtot - gl) ** 2 / ((htot - hl) + lam))
    else:
        raise ValueError(f"unknown criterion {criterion!r}")
    valid = (xs[1:] > xs[:-1]) & (nl >= min_leaf) & (nr >= min_leaf)
    score = np.where(valid, score, np.inf)
    best = score.min()
    if not np.isfinite(best):
        return None
    rows, cols = np.nonzero(score == best)
    best_col = -1
    best_thr = 0.0
    for r, c in zip(rows.tolist(), cols.tolist()):
        lo, hi = xs[r, c], xs[r + 1, c]
        thr = (lo + hi) / 2.0
        if thr <= lo:  # midpoint rounded down to the boundary value
            thr = hi
        if best_col < 0 or c < best_col or (c == best_col and thr < best_thr):
            best_col, best_thr = c, thr
    return best_col, float(best_thr)


def grow_tree(X: np.ndarray, t: np.ndarray, *, criterion: str,
              max_depth: int | None, min_leaf: int,
              leaf_value, rng: np.random.Generator | None = None,
              max_features: int | None = None,
              aux: np.ndarray | None = None, lam: float = 1.0) -> dict:
    """Grow one tree; *leaf_value(idx)* supplies each leaf's payload.

    With *rng* and *max_features* set, every split considers a fresh random
    feature subset (random-forest style); otherwise all features. The
    'gain' criterion additionally needs per-row hessians in *aux*.
    """
    n, d = X.shape

    def features() -> np.ndarray:
        if max_features is None or rng is None or max_features >= d:
            return np.arange(d)
        return np.sort(rng.choice(d, size=max_features, replace=False))

    def grow(idx: np.ndarray, depth: int) -> dict:
        tsub = t[idx]
        pure = tsub.size == 0 or (tsub.max() - tsub.min()) == 0.0
        if pure or (max_depth is not None and depth >= max_depth) \
                or len(idx) < 2 * min_leaf:
            return {"v": float(leaf_value(idx))}
        feats = features()
        found = _best_split(X[np.ix_(idx, feats)], tsub, min_leaf, criterion,
                            aux=None if aux is None else aux[idx], lam=lam)
        if found is None:
            return {"v": float(leaf_value(idx))}
        col, thr = found
        f = int(feats[col])
        mask = X[idx, f] < thr
        return {
            "f": f,
            "t": thr,
            "l": grow(idx[mask], depth + 1),
            "r": grow(idx[~mask], depth + 1),
        }

    return grow(np.arange(n), 0)


def predict_tree(tree: dict, X: np.ndarray) -> np.ndarray:
    out = np.empty(len(X), dtype=np.float64)
    for i, row in enumerate(X):
        node = tree
        while "f" in node:
            node = node["l"] if row[node["f"]] < node["t"] else node["r"]
        out[i] = node["v"]
    return out


def tree_max_feature(tree: dict) -> int:
    """Largest feature index referenced; -1 for a bare leaf."""
    best = -1
    stack = [tree]
    while stack:
        node = stack.pop()
        if "f" in node:
            best = max(best, node["f"])
            stack.append(node["l"])
            stack.append(node["r"])
    return best
