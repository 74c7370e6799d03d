"""From-scratch probabilistic binary classifiers on dense 0/1 feature matrices.

Three learners share the score(x) -> [0, 1] contract:
  * logistic linear model, full-batch gradient descent with L2 penalty
  * CART-style decision tree with Gini splits and Laplace-smoothed leaves
  * bagged random forest of such trees with per-node feature subsampling

Training is fully determined by (data, config, seed); each forest tree draws
its RNG stream from (seed, tree_index) so tree-level parallelism could never
change results.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

import numpy as np

from .features import DimensionError, SparseBinaryVector, densify

FORMAT_VERSION = "pudroid-model/1"


class TrainingError(ValueError):
    pass


class Learner(Enum):
    LINEAR = "linear"
    TREE = "tree"
    FOREST = "forest"


@dataclass(frozen=True)
class LinearParams:
    learning_rate: float = 0.1
    epochs: int = 200
    l2: float = 1e-3


@dataclass(frozen=True)
class TreeParams:
    max_depth: int = 12
    min_leaf: int = 5


@dataclass(frozen=True)
class ForestParams:
    n_trees: int = 100
    features_per_split: Union[int, str] = "sqrt"
    bootstrap: bool = True


@dataclass(frozen=True)
class TrainConfig:
    seed: int = 0
    learner: Learner = Learner.FOREST
    linear: LinearParams = field(default_factory=LinearParams)
    tree: TreeParams = field(default_factory=TreeParams)
    forest: ForestParams = field(default_factory=ForestParams)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "learner": self.learner.value,
            "linear": vars(self.linear).copy(),
            "tree": vars(self.tree).copy(),
            "forest": vars(self.forest).copy(),
        }


def _validate_training_input(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or len(y) != X.shape[0]:
        raise TrainingError("X must be (n, d) with one target per row")
    if X.shape[0] == 0:
        raise TrainingError("empty training set")
    if len(np.unique(y)) < 2:
        raise TrainingError("degenerate target: only one class present")
    return X, y


class ProbabilisticClassifier:
    """Common scoring surface; subclasses implement score_matrix."""

    dimension: int

    def score_matrix(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def score(self, x: SparseBinaryVector) -> float:
        dense = densify(x, self.dimension).astype(np.float64)
        return float(self.score_matrix(dense[None, :])[0])

    def classify(self, x: SparseBinaryVector, threshold: float = 0.5) -> int:
        if not 0.0 < threshold < 1.0:
            raise ValueError("threshold must be in (0, 1)")
        return int(self.score(x) > threshold)

    def _check_dim(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.shape[1] != self.dimension:
            raise DimensionError(
                f"input has {X.shape[1]} features, model expects {self.dimension}"
            )
        return X

    def to_dict(self) -> dict:
        raise NotImplementedError

    def serialize(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


# ---------------------------------------------------------------------------
# logistic linear model


def logistic_loss_and_grad(
    w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray, l2: float
) -> tuple[float, np.ndarray, float]:
    """Mean cross-entropy plus 0.5*l2*||w||^2; returns (loss, dw, db).

    The intercept is not penalized.
    """
    z = X @ w + b
    p = 1.0 / (1.0 + np.exp(-z))
    eps = 1e-12
    loss = float(-np.mean(y * np.log(p + eps) + (1 - y) * np.log(1 - p + eps)))
    loss += 0.5 * l2 * float(w @ w)
    resid = p - y
    dw = X.T @ resid / len(y) + l2 * w
    db = float(np.mean(resid))
    return loss, dw, db


class LinearModel(ProbabilisticClassifier):
    def __init__(self, weights: np.ndarray, bias: float):
        self.weights = np.asarray(weights, dtype=np.float64)
        self.bias = float(bias)
        self.dimension = len(self.weights)

    def score_matrix(self, X: np.ndarray) -> np.ndarray:
        X = self._check_dim(X)
        return 1.0 / (1.0 + np.exp(-(X @ self.weights + self.bias)))

    def to_dict(self) -> dict:
        return {
            "version": FORMAT_VERSION,
            "type": "linear",
            "weights": [repr(float(v)) for v in self.weights],
            "bias": repr(self.bias),
        }

    @classmethod
    def fit(cls, X: np.ndarray, y: np.ndarray, params: LinearParams) -> "LinearModel":
        X, y = _validate_training_input(X, y)
        w = np.zeros(X.shape[1])
        b = 0.0
        yf = y.astype(np.float64)
        for _ in range(params.epochs):
            _, dw, db = logistic_loss_and_grad(w, b, X, yf, params.l2)
            w -= params.learning_rate * dw
            b -= params.learning_rate * db
        return cls(w, b)


# ---------------------------------------------------------------------------
# decision tree


@dataclass(frozen=True)
class _Leaf:
    prob: float


@dataclass(frozen=True)
class _Split:
    feature: int
    absent: "_Leaf | _Split"
    present: "_Leaf | _Split"


def _gini(n: np.ndarray, pos: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(n > 0, pos / np.maximum(n, 1), 0.0)
    return 1.0 - p * p - (1.0 - p) * (1.0 - p)


def _best_split(
    X: np.ndarray, y: np.ndarray, candidates: np.ndarray, min_leaf: int
) -> Optional[int]:
    """Candidate feature with the largest Gini gain; ties go to the lowest index.

    Returns None when no candidate yields a valid split with positive gain.
    """
    n = len(y)
    pos = float(y.sum())
    ones = X[:, candidates]
    n1 = ones.sum(axis=0).astype(np.float64)
    pos1 = (y @ ones).astype(np.float64)
    n0 = n - n1
    pos0 = pos - pos1
    weighted = (n0 * _gini(n0, pos0) + n1 * _gini(n1, pos1)) / n
    p_parent = pos / n
    parent = 1.0 - p_parent * p_parent - (1.0 - p_parent) * (1.0 - p_parent)
    gain = parent - weighted
    valid = (n0 >= min_leaf) & (n1 >= min_leaf) & (gain > 1e-12)
    if not valid.any():
        return None
    gain = np.where(valid, gain, -np.inf)
    # candidates are sorted ascending, so argmax's first-hit rule breaks ties
    # toward the lowest feature index
    return int(candidates[int(np.argmax(gain))])


def _grow(
    X: np.ndarray,
    y: np.ndarray,
    depth: int,
    params: TreeParams,
    k: Optional[int],
    rng: Optional[np.random.Generator],
) -> "_Leaf | _Split":
    n = len(y)
    pos = int(y.sum())
    if depth >= params.max_depth or n < 2 * params.min_leaf or pos in (0, n):
        return _Leaf((pos + 1) / (n + 2))
    d = X.shape[1]
    if k is None or k >= d:
        candidates = np.arange(d)
    else:
        candidates = np.sort(rng.choice(d, size=k, replace=False))
    feat = _best_split(X, y, candidates, params.min_leaf)
    if feat is None:
        return _Leaf((pos + 1) / (n + 2))
    mask = X[:, feat] > 0.5
    absent = _grow(X[~mask], y[~mask], depth + 1, params, k, rng)
    present = _grow(X[mask], y[mask], depth + 1, params, k, rng)
    return _Split(feat, absent, present)


def _score_into(node: "_Leaf | _Split", X: np.ndarray, rows: np.ndarray, out: np.ndarray) -> None:
    if isinstance(node, _Leaf):
        out[rows] = node.prob
        return
    present = X[rows, node.feature] > 0.5
    _score_into(node.absent, X, rows[~present], out)
    _score_into(node.present, X, rows[present], out)


def _node_to_dict(node: "_Leaf | _Split") -> dict:
    if isinstance(node, _Leaf):
        return {"leaf": repr(node.prob)}
    return {
        "feature": node.feature,
        "absent": _node_to_dict(node.absent),
        "present": _node_to_dict(node.present),
    }


class TreeModel(ProbabilisticClassifier):
    def __init__(self, root: "_Leaf | _Split", dimension: int):
        self.root = root
        self.dimension = dimension

    def score_matrix(self, X: np.ndarray) -> np.ndarray:
        X = self._check_dim(X)
        out = np.empty(X.shape[0])
        _score_into(self.root, X, np.arange(X.shape[0]), out)
        return out

    def split_features(self) -> list[int]:
        """Feature indices of internal nodes in pre-order (structure fingerprint)."""
        out: list[int] = []

        def walk(node: "_Leaf | _Split") -> None:
            if isinstance(node, _Split):
                out.append(node.feature)
                walk(node.absent)
                walk(node.present)

        walk(self.root)
        return out

    def to_dict(self) -> dict:
        return {
            "version": FORMAT_VERSION,
            "type": "tree",
            "dimension": self.dimension,
            "root": _node_to_dict(self.root),
        }

    @classmethod
    def fit(cls, X: np.ndarray, y: np.ndarray, params: TreeParams) -> "TreeModel":
        X, y = _validate_training_input(X, y)
        root = _grow(X, y, 0, params, None, None)
        return cls(root, X.shape[1])


# ---------------------------------------------------------------------------
# random forest


class ForestModel(ProbabilisticClassifier):
    def __init__(self, trees: list[TreeModel], dimension: int):
        self.trees = trees
        self.dimension = dimension

    def score_matrix(self, X: np.ndarray) -> np.ndarray:
        X = self._check_dim(X)
        total = np.zeros(X.shape[0])
        for tree in self.trees:
            total += tree.score_matrix(X)
        return total / len(self.trees)

    def to_dict(self) -> dict:
        return {
            "version": FORMAT_VERSION,
            "type": "forest",
            "dimension": self.dimension,
            "trees": [_node_to_dict(t.root) for t in self.trees],
        }

    @classmethod
    def fit(
        cls,
        X: np.ndarray,
        y: np.ndarray,
        params: ForestParams,
        tree_params: TreeParams,
        seed: int,
    ) -> "ForestModel":
        X, y = _validate_training_input(X, y)
        n, d = X.shape
        if params.features_per_split == "sqrt":
            k = math.ceil(math.sqrt(d))
        else:
            k = int(params.features_per_split)
            if k > d:
                raise TrainingError("features_per_split exceeds the dimension")
        trees: list[TreeModel] = []
        for t in range(params.n_trees):
            rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, t])))
            if params.bootstrap:
                idx = rng.integers(0, n, size=n)
                Xt, yt = X[idx], y[idx]
                if len(np.unique(yt)) < 2:  # degenerate resample: fall back to full data
                    Xt, yt = X, y
            else:
                Xt, yt = X, y
            root = _grow(Xt, yt, 0, tree_params, k, rng)
            trees.append(TreeModel(root, d))
        return cls(trees, d)


# ---------------------------------------------------------------------------
# front door


def train(X: np.ndarray, y: np.ndarray, cfg: TrainConfig) -> ProbabilisticClassifier:
    """Train the configured learner on a dense 0/1 matrix with binary targets."""
    if cfg.learner is Learner.LINEAR:
        return LinearModel.fit(X, y, cfg.linear)
    if cfg.learner is Learner.TREE:
        return TreeModel.fit(X, y, cfg.tree)
    return ForestModel.fit(X, y, cfg.forest, cfg.tree, cfg.seed)


def _node_from_dict(data: dict) -> "_Leaf | _Split":
    if "leaf" in data:
        return _Leaf(float(data["leaf"]))
    return _Split(
        int(data["feature"]),
        _node_from_dict(data["absent"]),
        _node_from_dict(data["present"]),
    )


def deserialize(text: str) -> ProbabilisticClassifier:
    data = json.loads(text)
    if data.get("version") != FORMAT_VERSION:
        raise ValueError(f"unsupported model format: {data.get('version')!r}")
    if data["type"] == "linear":
        return LinearModel(np.array([float(v) for v in data["weights"]]), float(data["bias"]))
    if data["type"] == "tree":
        return TreeModel(_node_from_dict(data["root"]), int(data["dimension"]))
    if data["type"] == "forest":
        d = int(data["dimension"])
        return ForestModel([TreeModel(_node_from_dict(t), d) for t in data["trees"]], d)
    raise ValueError(f"unknown model type {data['type']!r}")
