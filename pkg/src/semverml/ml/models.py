"""The four classifiers plus the majority baseline, with JSON persistence.

Fixed documented defaults (overridable per call):

- decision tree: unlimited depth, min_leaf 1, gini impurity, deterministic
  tie-break toward the lowest feature index then lowest threshold;
- random forest: 100 trees, bootstrap sampling, per-split random feature
  subset of floor(sqrt(d)) features, per-tree seeds derived from the
  master seed;
- gradient boosting: 100 rounds of depth-3 regression trees on the
  logistic-loss residuals, learning rate 0.1, second-order leaf values
  with L2 weight 1.0 on leaves;
- logistic regression: z-scored inputs (training statistics stored in the
  model, zero-variance columns dropped), L2 1.0, gradient descent with
  backtracking line search, tolerance 1e-6, at most 1000 steps;
- zeror: constant score equal to the training prevalence of class 1.

Model files are JSON: ``{"algorithm", "seed", "feature_names", "params"``
plus ``"trees"`` / ``"weights"`` / ``"prior"}``; loading reproduces the
predictor exactly.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from ..errors import SingleClassInput
from .data import BinaryDataset
from .tree import grow_tree, predict_tree

DT_DEFAULTS = {"max_depth": None, "min_leaf": 1, "criterion": "gini"}
RF_DEFAULTS = {"n_trees": 100, "max_features": None, "bootstrap": True,
               "max_depth": None, "min_leaf": 1}
GBT_DEFAULTS = {"n_rounds": 100, "learning_rate": 0.1, "max_depth": 3,
                "min_leaf": 1, "lambda_l2": 1.0}
LR_DEFAULTS = {"l2": 1.0, "max_iter": 1000, "tol": 1e-6}

ALGORITHMS = ("gbt", "rf", "dt", "lr", "zeror")


def sigmoid(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def log_loss(y: np.ndarray, p: np.ndarray) -> float:
    p = np.clip(p, 1e-15, 1.0 - 1e-15)
    return float(-np.mean(y * np.log(p) + (1 - y) * np.log(1 - p)))


def _require_both_classes(y: np.ndarray, algorithm: str):
    if len(np.unique(y)) < 2:
        raise SingleClassInput(
            f"{algorithm}: training data contains a single class")


def _seed_for(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), *key]))


class _Model:
    algorithm = "?"

    def __init__(self, params: dict, feature_names, seed: int):
        self.params = params
        self.feature_names = list(feature_names)
        self.seed = int(seed)

    def predict_scores(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def predict_one(self, x) -> float:
        return float(self.predict_scores(np.asarray(x, dtype=np.float64)
                                         .reshape(1, -1))[0])

    def _base_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "seed": self.seed,
            "feature_names": self.feature_names,
            "params": self.params,
        }


class DecisionTreeModel(_Model):
    algorithm = "dt"

    def __init__(self, params, feature_names, seed, tree: dict):
        super().__init__(params, feature_names, seed)
        self.tree = tree

    def predict_scores(self, X):
        return predict_tree(self.tree, np.asarray(X, dtype=np.float64))

    def to_dict(self):
        return {**self._base_dict(), "trees": [self.tree]}

    @classmethod
    def from_dict(cls, d):
        return cls(d["params"], d["feature_names"], d["seed"], d["trees"][0])


class RandomForestModel(_Model):
    algorithm = "rf"

    def __init__(self, params, feature_names, seed, trees: list[dict],
                 oob_accuracy: float | None = None):
        super().__init__(params, feature_names, seed)
        self.trees = trees
        self.oob_accuracy = oob_accuracy

    def predict_scores(self, X):
        X = np.asarray(X, dtype=np.float64)
        total = np.zeros(len(X))
        for tree in self.trees:
            total += predict_tree(tree, X)
        return total / len(self.trees)

    def to_dict(self):
        return {**self._base_dict(), "trees": self.trees}

    @classmethod
    def from_dict(cls, d):
        return cls(d["params"], d["feature_names"], d["seed"], d["trees"])


class GradientBoostingModel(_Model):
    algorithm = "gbt"

    def __init__(self, params, feature_names, seed, base_margin: float,
                 trees: list[dict], train_losses: list[float] | None = None):
        super().__init__(params, feature_names, seed)
        self.base_margin = base_margin
        self.trees = trees
        self.train_losses = train_losses or []

    def margins(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        lr = self.params["learning_rate"]
        F = np.full(len(X), self.base_margin)
        for tree in self.trees:
            F += lr * predict_tree(tree, X)
        return F

    def predict_scores(self, X):
        return sigmoid(self.margins(X))

    def to_dict(self):
        return {**self._base_dict(),
                "trees": {"base_margin": self.base_margin,
                          "stages": self.trees}}

    @classmethod
    def from_dict(cls, d):
        return cls(d["params"], d["feature_names"], d["seed"],
                   d["trees"]["base_margin"], d["trees"]["stages"])


class LogisticModel(_Model):
    algorithm = "lr"

    def __init__(self, params, feature_names, seed, weights: dict):
        super().__init__(params, feature_names, seed)
        self.weights = weights

    def predict_scores(self, X):
        X = np.asarray(X, dtype=np.float64)
        w = np.asarray(self.weights["w"])
        mu = np.asarray(self.weights["mean"])
        sd = np.asarray(self.weights["scale"])
        z = (X - mu) / sd
        return sigmoid(z @ w + self.weights["b"])

    def to_dict(self):
        return {**self._base_dict(), "weights": self.weights}

    @classmethod
    def from_dict(cls, d):
        return cls(d["params"], d["feature_names"], d["seed"], d["weights"])


class ZeroRModel(_Model):
    algorithm = "zeror"

    def __init__(self, params, feature_names, seed, prior: float):
        super().__init__(params, feature_names, seed)
        self.prior = prior

    def predict_scores(self, X):
        return np.full(len(np.asarray(X)), self.prior)

    def to_dict(self):
        return {**self._base_dict(), "prior": self.prior}

    @classmethod
    def from_dict(cls, d):
        return cls(d["params"], d["feature_names"], d["seed"], d["prior"])


# ---------------------------------------------------------------------------
# trainers

def train_decision_tree(ds: BinaryDataset, params: dict | None = None,
                        seed: int = 0) -> DecisionTreeModel:
    p = {**DT_DEFAULTS, **(params or {})}
    y = ds.y.astype(np.float64)
    _require_both_classes(ds.y, "dt")
    tree = grow_tree(ds.X, y, criterion=p["criterion"],
                     max_depth=p["max_depth"], min_leaf=p["min_leaf"],
                     leaf_value=lambda idx: float(y[idx].mean()))
    return DecisionTreeModel(p, ds.feature_names, seed, tree)


def train_random_forest(ds: BinaryDataset, params: dict | None = None,
                        seed: int = 0) -> RandomForestModel:
    p = {**RF_DEFAULTS, **(params or {})}
    _require_both_classes(ds.y, "rf")
    y = ds.y.astype(np.float64)
    n, d = ds.X.shape
    max_features = p["max_features"]
    if max_features is None:
        max_features = max(1, int(math.sqrt(d)))
    trees = []
    oob_sum = np.zeros(n)
    oob_cnt = np.zeros(n)
    for k in range(p["n_trees"]):
        rng = _seed_for(seed, 1, k)
        if p["bootstrap"]:
            sample = rng.integers(0, n, size=n)
        else:
            sample = np.arange(n)
        Xs, ys = ds.X[sample], y[sample]
        tree = grow_tree(Xs, ys, criterion="gini", max_depth=p["max_depth"],
                         min_leaf=p["min_leaf"],
                         leaf_value=lambda idx, _ys=ys: float(_ys[idx].mean()),
                         rng=rng, max_features=max_features)
        trees.append(tree)
        if p["bootstrap"]:
            out = np.ones(n, dtype=bool)
            out[sample] = False
            if out.any():
                oob_sum[out] += predict_tree(tree, ds.X[out])
                oob_cnt[out] += 1
    oob_accuracy = None
    if p["bootstrap"] and (oob_cnt > 0).any():
        seen = oob_cnt > 0
        pred = (oob_sum[seen] / oob_cnt[seen]) >= 0.5
        oob_accuracy = float(np.mean(pred == (ds.y[seen] == 1)))
    params_out = {**p, "max_features": max_features}
    return RandomForestModel(params_out, ds.feature_names, seed, trees,
                             oob_accuracy)


def train_gbt(ds: BinaryDataset, params: dict | None = None,
              seed: int = 0) -> GradientBoostingModel:
    p = {**GBT_DEFAULTS, **(params or {})}
    _require_both_classes(ds.y, "gbt")
    y = ds.y.astype(np.float64)
    lam = p["lambda_l2"]
    lr = p["learning_rate"]
    base_rate = float(np.clip(y.mean(), 1e-12, 1 - 1e-12))
    base_margin = math.log(base_rate / (1.0 - base_rate))
    F = np.full(len(y), base_margin)
    losses = [log_loss(y, sigmoid(F))]
    trees = []
    for _ in range(p["n_rounds"]):
        prob = sigmoid(F)
        g = y - prob              # negative gradient of the logistic loss
        h = prob * (1.0 - prob)

        def leaf_value(idx):
            return float(g[idx].sum() / (h[idx].sum() + lam))

        tree = grow_tree(ds.X, g, criterion="gain", max_depth=p["max_depth"],
                         min_leaf=p["min_leaf"], leaf_value=leaf_value,
                         aux=h, lam=lam)
        trees.append(tree)
        F += lr * predict_tree(tree, ds.X)
        losses.append(log_loss(y, sigmoid(F)))
    return GradientBoostingModel(p, ds.feature_names, seed, base_margin,
                                 trees, losses)


def logistic_objective(w: np.ndarray, b: float, Xz: np.ndarray,
                       y: np.ndarray, l2: float):
    """Mean penalized negative log-likelihood and its gradient."""
    n = len(y)
    z = Xz @ w + b
    sgn = 2.0 * y - 1.0
    loss = float(np.mean(np.logaddexp(0.0, -sgn * z))
                 + l2 * float(w @ w) / (2.0 * n))
    p = sigmoid(z)
    grad_w = (Xz.T @ (p - y)) / n + l2 * w / n
    grad_b = float(np.mean(p - y))
    return loss, grad_w, grad_b


def train_logistic(ds: BinaryDataset, params: dict | None = None,
                   seed: int = 0) -> LogisticModel:
    p = {**LR_DEFAULTS, **(params or {})}
    _require_both_classes(ds.y, "lr")
    y = ds.y.astype(np.float64)
    n, d = ds.X.shape
    mu = ds.X.mean(axis=0) if n else np.zeros(d)
    sd = ds.X.std(axis=0) if n else np.ones(d)
    keep = sd > 0
    sd_safe = np.where(keep, sd, 1.0)
    Xz = (ds.X[:, keep] - mu[keep]) / sd_safe[keep]
    w = np.zeros(int(keep.sum()))
    b = 0.0
    step = 1.0
    converged = False
    n_iter = 0
    loss, gw, gb = logistic_objective(w, b, Xz, y, p["l2"])
    for n_iter in range(1, p["max_iter"] + 1):
        gnorm = max(float(np.abs(gw).max(initial=0.0)), abs(gb))
        if gnorm < p["tol"]:
            converged = True
            break
        g2 = float(gw @ gw) + gb * gb
        while step > 1e-12:
            w2 = w - step * gw
            b2 = b - step * gb
            loss2, gw2, gb2 = logistic_objective(w2, b2, Xz, y, p["l2"])
            if loss2 <= loss - 1e-4 * step * g2:
                w, b, loss, gw, gb = w2, b2, loss2, gw2, gb2
                step = min(step * 2.0, 64.0)
                break
            step *= 0.5
        else:
            break  # no usable step left
    w_full = np.zeros(d)
    w_full[keep] = w
    weights = {
        "w": [float(v) for v in w_full],
        "b": float(b),
        "mean": [float(v) for v in mu],
        "scale": [float(v) for v in sd_safe],
        "dropped": [int(i) for i in np.nonzero(~keep)[0]],
        "converged": bool(converged),
        "n_iter": int(n_iter),
    }
    return LogisticModel(p, ds.feature_names, seed, weights)


def train_zero_r(ds: BinaryDataset, params: dict | None = None,
                 seed: int = 0) -> ZeroRModel:
    if len(ds.y) == 0:
        raise SingleClassInput("zeror: empty training data")
    return ZeroRModel(params or {}, ds.feature_names, seed,
                      float(np.mean(ds.y == 1)))


_TRAINERS = {
    "dt": train_decision_tree,
    "rf": train_random_forest,
    "gbt": train_gbt,
    "lr": train_logistic,
    "zeror": train_zero_r,
}

_CLASSES = {
    "dt": DecisionTreeModel,
    "rf": RandomForestModel,
    "gbt": GradientBoostingModel,
    "lr": LogisticModel,
    "zeror": ZeroRModel,
}


def train_model(algorithm: str, ds: BinaryDataset,
                params: dict | None = None, seed: int = 0) -> _Model:
    if algorithm not in _TRAINERS:
        raise ValueError(f"unknown algorithm {algorithm!r}; "
                         f"expected one of {ALGORITHMS}")
    return _TRAINERS[algorithm](ds, params, seed)


def save_model(model: _Model, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(model.to_dict(), sort_keys=True,
                               separators=(",", ":")) + "\n",
                    encoding="utf-8")
    return path


def load_model(path) -> _Model:
    d = json.loads(Path(path).read_text(encoding="utf-8"))
    cls = _CLASSES.get(d.get("algorithm"))
    if cls is None:
        raise ValueError(f"{path}: unknown algorithm "
                         f"{d.get('algorithm')!r}")
    return cls.from_dict(d)
