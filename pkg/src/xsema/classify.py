"""Downstream classifiers over fused vectors, written from scratch.

Four algorithms: Gini decision tree, bootstrap random forest, multiclass
SAMME AdaBoost over depth-1 stumps, and a one-vs-rest linear SVM trained by
stochastic subgradient descent. Everything is deterministic given the seed,
and every tie (vote ties, equal-gain splits, equal scores) resolves to the
lowest class or feature index so runs reproduce bit-for-bit.

Class indices follow the fixed NT=0 < DT=1 < WT=2 ordering.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from .base import BaseEstimator, check_fit_inputs, check_matrix
from .errors import ConfigError

ALGORITHMS = ("decision-tree", "random-forest", "adaboost", "linear-svm")

DEFAULT_HYPERPARAMS = {
    "decision-tree": {"max_depth": 12, "min_samples_leaf": 2},
    "random-forest": {"n_trees": 100, "bootstrap": True,
                      "max_features": "sqrt", "max_depth": 12,
                      "min_samples_leaf": 2},
    "adaboost": {"n_estimators": 100},
    "linear-svm": {"l2_penalty": 1e-3, "epochs": 50, "learning_rate": 1e-2},
}


@dataclass(frozen=True)
class ClassifierSpec:
    algorithm: str
    hyperparams: Dict[str, object] = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}")
        defaults = DEFAULT_HYPERPARAMS[self.algorithm]
        unknown = set(self.hyperparams) - set(defaults)
        if unknown:
            raise ConfigError(f"unknown hyperparams for {self.algorithm}: {sorted(unknown)}")

    def resolved_hyperparams(self) -> Dict[str, object]:
        merged = dict(DEFAULT_HYPERPARAMS[self.algorithm])
        merged.update(self.hyperparams)
        return merged

    def to_dict(self) -> dict:
        return {"algorithm": self.algorithm,
                "hyperparams": dict(self.hyperparams), "seed": self.seed}

    @classmethod
    def from_dict(cls, data: dict) -> "ClassifierSpec":
        return cls(algorithm=data["algorithm"],
                   hyperparams=dict(data.get("hyperparams", {})),
                   seed=int(data.get("seed", 0)))


def make_classifier(spec: ClassifierSpec):
    hp = spec.resolved_hyperparams()
    if spec.algorithm == "decision-tree":
        return DecisionTreeClassifier(seed=spec.seed, **hp)
    if spec.algorithm == "random-forest":
        return RandomForestClassifier(seed=spec.seed, **hp)
    if spec.algorithm == "adaboost":
        return AdaBoostClassifier(seed=spec.seed, **hp)
    return LinearSVMClassifier(seed=spec.seed, **hp)


# ---------------------------------------------------------------------------
# decision tree


def _gini(class_weight_sums: np.ndarray) -> float:
    total = class_weight_sums.sum()
    if total <= 0:
        return 0.0
    p = class_weight_sums / total
    return 1.0 - float((p ** 2).sum())


def _best_split_for_feature(col, y, w, n_classes, min_samples_leaf):
    """Best (impurity, threshold) for one feature column, or None.

    Thresholds are midpoints between consecutive distinct sorted values;
    within a feature the lowest winning threshold is kept (strict <).
    """
    order = np.argsort(col, kind="stable")
    xs = col[order]
    ys = y[order]
    ws = w[order]
    n = len(xs)
    onehot = np.zeros((n, n_classes))
    onehot[np.arange(n), ys] = ws
    prefix = np.cumsum(onehot, axis=0)          # weights per class, left side
    total = prefix[-1]
    boundaries = np.flatnonzero(xs[:-1] < xs[1:])  # split after index i
    if len(boundaries) == 0:
        return None
    left_counts = boundaries + 1
    right_counts = n - left_counts
    valid = (left_counts >= min_samples_leaf) & (right_counts >= min_samples_leaf)
    boundaries = boundaries[valid]
    if len(boundaries) == 0:
        return None
    left = prefix[boundaries]
    right = total - left
    lw = left.sum(axis=1)
    rw = right.sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        gini_l = 1.0 - np.where(lw > 0, (left ** 2).sum(axis=1) / lw ** 2, 1.0)
        gini_r = 1.0 - np.where(rw > 0, (right ** 2).sum(axis=1) / rw ** 2, 1.0)
    tw = lw + rw
    impurity = (lw * gini_l + rw * gini_r) / tw
    best = int(np.argmin(impurity))             # argmin keeps the lowest index on ties
    threshold = 0.5 * (xs[boundaries[best]] + xs[boundaries[best] + 1])
    return float(impurity[best]), float(threshold)


class DecisionTreeClassifier(BaseEstimator):
    """CART-style classifier: Gini impurity, midpoint thresholds.

    Supports sample weights (needed by AdaBoost) and optional per-split
    feature subsampling (needed by the forest). Without subsampling the fit
    is rng-free, so training-row order cannot change the tree.
    """

    def __init__(self, max_depth=12, min_samples_leaf=2, max_features=None,
                 seed=0):
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf
        self.max_features = max_features
        self.seed = seed

    def fit(self, X, y, sample_weight=None, check_classes=True):
        X, y = check_fit_inputs(X, y, min_classes=2 if check_classes else 1)
        self.n_features_ = X.shape[1]
        self.n_classes_ = int(y.max()) + 1 if len(y) else 1
        w = (np.ones(len(y)) if sample_weight is None
             else np.asarray(sample_weight, dtype=np.float64))
        self._rng = np.random.default_rng(self.seed)
        self.tree_ = self._build(X, y, w, depth=0)
        return self

    def _n_split_features(self):
        if self.max_features is None:
            return self.n_features_
        if self.max_features == "sqrt":
            return max(1, int(np.sqrt(self.n_features_)))
        return min(int(self.max_features), self.n_features_)

    def _leaf(self, y, w):
        sums = np.bincount(y, weights=w, minlength=self.n_classes_)
        return {"leaf": int(np.argmax(sums))}   # argmax -> lowest class on ties

    def _build(self, X, y, w, depth):
        if (depth >= self.max_depth or len(y) < 2 * self.min_samples_leaf
                or len(np.unique(y)) == 1):
            return self._leaf(y, w)
        k = self._n_split_features()
        if k < self.n_features_:
            features = np.sort(self._rng.choice(self.n_features_, size=k,
                                                replace=False))
        else:
            features = np.arange(self.n_features_)
        parent = _gini(np.bincount(y, weights=w, minlength=self.n_classes_))
        best_feature = None
        best_threshold = None
        best_impurity = parent
        for f in features:                       # ascending: lowest index wins ties
            found = _best_split_for_feature(X[:, f], y, w, self.n_classes_,
                                            self.min_samples_leaf)
            if found is None:
                continue
            impurity, threshold = found
            if impurity < best_impurity - 1e-12:
                best_feature = int(f)
                best_threshold = threshold
                best_impurity = impurity
        if best_feature is None:
            return self._leaf(y, w)
        mask = X[:, best_feature] <= best_threshold
        return {
            "feature": best_feature,
            "threshold": best_threshold,
            "left": self._build(X[mask], y[mask], w[mask], depth + 1),
            "right": self._build(X[~mask], y[~mask], w[~mask], depth + 1),
        }

    def predict(self, X):
        X = check_matrix(X, n_features=self.n_features_)
        out = np.empty(len(X), dtype=np.int64)
        for i, row in enumerate(X):
            node = self.tree_
            while "leaf" not in node:
                node = node["left"] if row[node["feature"]] <= node["threshold"] \
                    else node["right"]
            out[i] = node["leaf"]
        return out

    def to_dict(self) -> dict:
        return {"tree": self.tree_, "n_features": self.n_features_,
                "n_classes": self.n_classes_}

    def from_fitted_dict(self, data: dict):
        self.tree_ = data["tree"]
        self.n_features_ = int(data["n_features"])
        self.n_classes_ = int(data["n_classes"])
        return self


# ---------------------------------------------------------------------------
# random forest


class RandomForestClassifier(BaseEstimator):
    """Bootstrap ensemble of Gini trees with sqrt feature subsampling.

    Per-tree seeds derive deterministically from (seed, tree_index); majority
    vote with ties to the lowest class index.
    """

    def __init__(self, n_trees=100, bootstrap=True, max_features="sqrt",
                 max_depth=12, min_samples_leaf=2, seed=0):
        self.n_trees = n_trees
        self.bootstrap = bootstrap
        self.max_features = max_features
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf
        self.seed = seed

    def fit(self, X, y):
        X, y = check_fit_inputs(X, y)
        self.n_features_ = X.shape[1]
        self.n_classes_ = int(y.max()) + 1
        self.trees_ = []
        n = len(y)
        for i in range(self.n_trees):
            seq = np.random.SeedSequence(entropy=self.seed, spawn_key=(i,))
            rng = np.random.default_rng(seq)
            if self.bootstrap:
                idx = rng.integers(0, n, size=n)
                xb, yb = X[idx], y[idx]
            else:
                xb, yb = X, y
            tree = DecisionTreeClassifier(
                max_depth=self.max_depth,
                min_samples_leaf=self.min_samples_leaf,
                max_features=self.max_features,
                seed=int(rng.integers(2 ** 31)),
            )
            tree.fit(xb, yb, check_classes=False)
            tree.n_classes_ = self.n_classes_
            self.trees_.append(tree)
        return self

    def predict(self, X):
        X = check_matrix(X, n_features=self.n_features_)
        votes = np.zeros((len(X), self.n_classes_), dtype=np.int64)
        for tree in self.trees_:
            pred = tree.predict(X)
            votes[np.arange(len(X)), pred] += 1
        return votes.argmax(axis=1)

    def to_dict(self) -> dict:
        return {"n_features": self.n_features_, "n_classes": self.n_classes_,
                "trees": [t.to_dict() for t in self.trees_]}

    def from_fitted_dict(self, data: dict):
        self.n_features_ = int(data["n_features"])
        self.n_classes_ = int(data["n_classes"])
        self.trees_ = []
        for td in data["trees"]:
            tree = DecisionTreeClassifier(max_depth=self.max_depth,
                                          min_samples_leaf=self.min_samples_leaf)
            tree.from_fitted_dict(td)
            self.trees_.append(tree)
        return self


# ---------------------------------------------------------------------------
# AdaBoost (multiclass SAMME over depth-1 stumps)


class AdaBoostClassifier(BaseEstimator):
    """SAMME boosting: needs only hard votes from the stump learners.

    Sample weights stay a probability distribution after every round; a round
    whose weighted error reaches 1 - 1/K stops boosting early.
    """

    def __init__(self, n_estimators=100, seed=0):
        self.n_estimators = n_estimators
        self.seed = seed

    def fit(self, X, y):
        X, y = check_fit_inputs(X, y)
        self.n_features_ = X.shape[1]
        self.n_classes_ = int(y.max()) + 1
        k = self.n_classes_
        n = len(y)
        w = np.full(n, 1.0 / n)
        self.stumps_ = []
        self.alphas_ = []
        for round_idx in range(self.n_estimators):
            stump = DecisionTreeClassifier(max_depth=1, min_samples_leaf=1,
                                           seed=self.seed)
            stump.fit(X, y, sample_weight=w)
            stump.n_classes_ = k
            pred = stump.predict(X)
            miss = pred != y
            err = float(w[miss].sum())
            if err >= 1.0 - 1.0 / k:
                break
            if err <= 0.0:
                self.stumps_.append(stump)
                self.alphas_.append(float(np.log(1e12)))
                break
            alpha = float(np.log((1.0 - err) / err) + np.log(k - 1.0))
            self.stumps_.append(stump)
            self.alphas_.append(alpha)
            w = w * np.exp(alpha * miss)
            w = w / w.sum()
        if not self.stumps_:
            # first stump was no better than chance; keep it unweighted
            stump = DecisionTreeClassifier(max_depth=1, min_samples_leaf=1,
                                           seed=self.seed)
            stump.fit(X, y, sample_weight=w)
            stump.n_classes_ = k
            self.stumps_.append(stump)
            self.alphas_.append(1.0)
        return self

    def predict(self, X):
        X = check_matrix(X, n_features=self.n_features_)
        scores = np.zeros((len(X), self.n_classes_))
        for stump, alpha in zip(self.stumps_, self.alphas_):
            pred = stump.predict(X)
            scores[np.arange(len(X)), pred] += alpha
        return scores.argmax(axis=1)

    def to_dict(self) -> dict:
        return {"n_features": self.n_features_, "n_classes": self.n_classes_,
                "alphas": list(self.alphas_),
                "stumps": [s.to_dict() for s in self.stumps_]}

    def from_fitted_dict(self, data: dict):
        self.n_features_ = int(data["n_features"])
        self.n_classes_ = int(data["n_classes"])
        self.alphas_ = [float(a) for a in data["alphas"]]
        self.stumps_ = []
        for sd in data["stumps"]:
            stump = DecisionTreeClassifier(max_depth=1, min_samples_leaf=1)
            stump.from_fitted_dict(sd)
            self.stumps_.append(stump)
        return self


# ---------------------------------------------------------------------------
# linear SVM (one-vs-rest, hinge + L2, stochastic subgradient descent)


class LinearSVMClassifier(BaseEstimator):

    def __init__(self, l2_penalty=1e-3, epochs=50, learning_rate=1e-2, seed=0):
        self.l2_penalty = l2_penalty
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.seed = seed

    def fit(self, X, y):
        X, y = check_fit_inputs(X, y)
        self.n_features_ = X.shape[1]
        self.n_classes_ = int(y.max()) + 1
        n, d = X.shape
        self.weights_ = np.zeros((self.n_classes_, d))
        self.biases_ = np.zeros(self.n_classes_)
        rng = np.random.default_rng(self.seed)
        for c in range(self.n_classes_):
            target = np.where(y == c, 1.0, -1.0)
            w = np.zeros(d)
            b = 0.0
            for _ in range(self.epochs):
                for i in rng.permutation(n):
                    margin = target[i] * (X[i] @ w + b)
                    if margin < 1.0:
                        w -= self.learning_rate * (self.l2_penalty * w
                                                   - target[i] * X[i])
                        b += self.learning_rate * target[i]
                    else:
                        w -= self.learning_rate * self.l2_penalty * w
            self.weights_[c] = w
            self.biases_[c] = b
        return self

    def decision_function(self, X):
        X = check_matrix(X, n_features=self.n_features_)
        return X @ self.weights_.T + self.biases_

    def predict(self, X):
        return self.decision_function(X).argmax(axis=1)

    def to_dict(self) -> dict:
        return {"n_features": self.n_features_, "n_classes": self.n_classes_,
                "weights": self.weights_.tolist(),
                "biases": self.biases_.tolist()}

    def from_fitted_dict(self, data: dict):
        self.n_features_ = int(data["n_features"])
        self.n_classes_ = int(data["n_classes"])
        self.weights_ = np.asarray(data["weights"], dtype=np.float64)
        self.biases_ = np.asarray(data["biases"], dtype=np.float64)
        return self


def classifier_from_dict(spec: ClassifierSpec, fitted: dict):
    model = make_classifier(spec)
    return model.from_fitted_dict(fitted)
