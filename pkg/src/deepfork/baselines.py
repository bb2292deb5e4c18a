"""Benchmark classifiers implemented from scratch on numpy.

All of them share the same contract: fit(x, y, seed) -> self,
predict_proba(x) -> positive-class probability per row, predict(x) ->
0/1 labels thresholded at 0.5 with ties going to 1. Training requires at
least two samples and both classes present. Every model is deterministic
given (seed, data).
"""

from __future__ import annotations

import numpy as np

from .errors import BadHyperparam, DegenerateData, NotFitted
from .serialize import decode_array, encode_array


class Classifier:
    KIND = "base"

    def __init__(self):
        self.fitted = False

    def fit(self, x, y, seed=0):
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        if x.ndim != 2 or y.shape != (x.shape[0],):
            raise ValueError(f"bad training shapes {x.shape} / {y.shape}")
        if x.shape[0] < 2:
            raise DegenerateData(f"need at least 2 samples, got {x.shape[0]}")
        classes = np.unique(y)
        if not np.array_equal(classes, [0, 1]):
            raise DegenerateData(f"need both classes 0 and 1, got {classes}")
        self._fit(x, y, seed)
        self.fitted = True
        return self

    def _fit(self, x, y, seed):
        raise NotImplementedError

    def predict_proba(self, x):
        if not self.fitted:
            raise NotFitted(f"{type(self).__name__} used before fit()")
        x = np.asarray(x, dtype=np.float64)
        return self._proba(x)

    def _proba(self, x):
        raise NotImplementedError

    def predict(self, x):
        # ties at 0.5 resolve to the positive class
        return (self.predict_proba(x) >= 0.5).astype(np.int64)

    def to_state(self):
        raise NotImplementedError

    @classmethod
    def from_state(cls, state):
        raise NotImplementedError


class RandomClassifier(Classifier):
    """Coin flip; probabilities drawn fresh from the stored seed per call."""

    KIND = "random"

    def __init__(self, seed=0):
        super().__init__()
        self.seed = seed

    def _fit(self, x, y, seed):
        self.seed = seed

    def _proba(self, x):
        rng = np.random.default_rng(self.seed)
        return rng.uniform(0.0, 1.0, size=x.shape[0])

    def to_state(self):
        return {"seed": self.seed}

    @classmethod
    def from_state(cls, state):
        c = cls(seed=state["seed"])
        c.fitted = True
        return c


class KNNClassifier(Classifier):
    """Majority vote over the k euclidean-nearest training points."""

    KIND = "knn"

    def __init__(self, k=5):
        super().__init__()
        if k < 1:
            raise BadHyperparam(f"k must be >= 1, got {k}")
        self.k = k
        self.x = None
        self.y = None

    def _fit(self, x, y, seed):
        if self.k > x.shape[0]:
            raise BadHyperparam(f"k={self.k} exceeds training size {x.shape[0]}")
        self.x = x.copy()
        self.y = y.copy()

    def _proba(self, x):
        out = np.empty(x.shape[0], dtype=np.float64)
        train_sq = np.sum(self.x * self.x, axis=1)
        # chunked so the n_query x n_train distance matrix stays bounded
        chunk = max(1, int(4e6) // max(1, self.x.shape[0]))
        for lo in range(0, x.shape[0], chunk):
            q = x[lo:lo + chunk]
            d2 = train_sq - 2.0 * (q @ self.x.T) + np.sum(q * q, axis=1)[:, None]
            # stable sort: equal distances resolve to the lower training index
            order = np.argsort(d2, axis=1, kind="stable")[:, :self.k]
            out[lo:lo + len(q)] = self.y[order].mean(axis=1)
        return out

    def to_state(self):
        return {"k": self.k, "x": encode_array(self.x),
                "y": encode_array(self.y)}

    @classmethod
    def from_state(cls, state):
        c = cls(k=state["k"])
        c.x = decode_array(state["x"])
        c.y = decode_array(state["y"])
        c.fitted = True
        return c


class GaussianNBClassifier(Classifier):
    """Naive Bayes with per-class Gaussian feature likelihoods.

    Uses the independence factorization P(X|C) = prod_i P(X_i|C) with a
    variance floor of 1e-9; posteriors are normalized in log space.
    """

    KIND = "nb"

    VAR_FLOOR = 1e-9

    def __init__(self):
        super().__init__()
        self.means = None
        self.vars = None
        self.log_priors = None

    def _fit(self, x, y, seed):
        means, variances, priors = [], [], []
        for c in (0, 1):
            xc = x[y == c]
            means.append(xc.mean(axis=0))
            variances.append(np.maximum(xc.var(axis=0), self.VAR_FLOOR))
            priors.append(len(xc) / len(x))
        self.means = np.stack(means)
        self.vars = np.stack(variances)
        self.log_priors = np.log(np.array(priors))

    def class_log_posteriors(self, x):
        """(n, 2) normalized log posteriors."""
        if not self.fitted:
            raise NotFitted("GaussianNBClassifier used before fit()")
        x = np.asarray(x, dtype=np.float64)
        joint = np.empty((x.shape[0], 2), dtype=np.float64)
        for c in (0, 1):
            diff = x - self.means[c]
            joint[:, c] = self.log_priors[c] - 0.5 * np.sum(
                np.log(2.0 * np.pi * self.vars[c]) + diff * diff / self.vars[c],
                axis=1)
        top = joint.max(axis=1, keepdims=True)
        log_norm = top + np.log(np.exp(joint - top).sum(axis=1, keepdims=True))
        return joint - log_norm

    def _proba(self, x):
        return np.exp(self.class_log_posteriors(x)[:, 1])

    def to_state(self):
        return {"means": encode_array(self.means),
                "vars": encode_array(self.vars),
                "log_priors": encode_array(self.log_priors)}

    @classmethod
    def from_state(cls, state):
        c = cls()
        c.means = decode_array(state["means"])
        c.vars = decode_array(state["vars"])
        c.log_priors = decode_array(state["log_priors"])
        c.fitted = True
        return c


class _Tree:
    """Flat-array binary tree; feature == -1 marks a leaf."""

    __slots__ = ("feature", "threshold", "left", "right", "value")

    def __init__(self):
        self.feature = []
        self.threshold = []
        self.left = []
        self.right = []
        self.value = []

    def add_node(self):
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(0.0)
        return len(self.feature) - 1

    def finish(self):
        self.feature = np.array(self.feature, dtype=np.int64)
        self.threshold = np.array(self.threshold, dtype=np.float64)
        self.left = np.array(self.left, dtype=np.int64)
        self.right = np.array(self.right, dtype=np.int64)
        self.value = np.array(self.value, dtype=np.float64)
        return self

    def proba(self, x):
        # advance every non-leaf row one level per pass
        idx = np.zeros(x.shape[0], dtype=np.int64)
        while True:
            rows = np.nonzero(self.feature[idx] >= 0)[0]
            if len(rows) == 0:
                break
            at = idx[rows]
            go_left = x[rows, self.feature[at]] <= self.threshold[at]
            idx[rows] = np.where(go_left, self.left[at], self.right[at])
        return self.value[idx]

    def to_state(self):
        return {"feature": encode_array(self.feature),
                "threshold": encode_array(self.threshold),
                "left": encode_array(self.left),
                "right": encode_array(self.right),
                "value": encode_array(self.value)}

    @classmethod
    def from_state(cls, state):
        t = cls()
        for name in cls.__slots__:
            setattr(t, name, decode_array(state[name]))
        return t


def _gini_counts(n_pos, n_tot):
    """Sum over nodes of n_tot * gini, vectorized over candidate splits."""
    with np.errstate(invalid="ignore", divide="ignore"):
        p = n_pos / n_tot
    g = 1.0 - p * p - (1.0 - p) * (1.0 - p)
    return np.where(n_tot > 0, n_tot * g, 0.0)


def _best_split(x, y, feats, min_leaf, rng=None):
    """Best (impurity decrease, feature, threshold) over candidate features.

    Midpoint thresholds between adjacent distinct values by default; with
    rng set, one uniform-random threshold per feature instead.
    """
    n = len(y)
    n_pos = int(y.sum())
    parent = _gini_counts(np.array(n_pos, dtype=np.float64),
                          np.array(n, dtype=np.float64))
    best = (1e-12, -1, 0.0)
    for f in feats:
        col = x[:, f]
        if rng is not None:
            lo, hi = col.min(), col.max()
            if lo == hi:
                continue
            thresh = rng.uniform(lo, hi)
            n_l = int(np.sum(col <= thresh))
            if n_l < min_leaf or n - n_l < min_leaf:
                continue
            pos_l = int(y[col <= thresh].sum())
            child = (_gini_counts(np.array(float(pos_l)), np.array(float(n_l)))
                     + _gini_counts(np.array(float(n_pos - pos_l)),
                                    np.array(float(n - n_l))))
            dec = float(parent - child)
            if dec > best[0]:
                best = (dec, f, float(thresh))
            continue
        order = np.argsort(col, kind="stable")
        cs = col[order]
        ys = y[order]
        cut = np.nonzero(cs[:-1] != cs[1:])[0]  # split after index i
        if len(cut) == 0:
            continue
        n_left = cut + 1
        pos_left = np.cumsum(ys)[cut]
        ok = (n_left >= min_leaf) & (n - n_left >= min_leaf)
        if not np.any(ok):
            continue
        child = (_gini_counts(pos_left.astype(np.float64),
                              n_left.astype(np.float64))
                 + _gini_counts(float(n_pos) - pos_left,
                                float(n) - n_left.astype(np.float64)))
        dec = np.where(ok, parent - child, -np.inf)
        i = int(np.argmax(dec))
        if dec[i] > best[0]:
            best = (float(dec[i]), f,
                    float((cs[cut[i]] + cs[cut[i] + 1]) / 2.0))
    return best


def _grow_tree(x, y, max_depth, min_leaf, rng=None, max_features=None,
               random_thresholds=False):
    tree = _Tree()

    def recurse(idx, depth):
        node = tree.add_node()
        ys = y[idx]
        tree.value[node] = float(ys.mean())
        if depth >= max_depth or len(idx) < 2 * min_leaf or ys.min() == ys.max():
            return node
        d = x.shape[1]
        if max_features is not None and max_features < d:
            feats = rng.choice(d, size=max_features, replace=False)
        else:
            feats = range(d)
        dec, f, thresh = _best_split(
            x[idx], ys, feats, min_leaf,
            rng=rng if random_thresholds else None)
        if f < 0:
            return node
        go_left = x[idx, f] <= thresh
        tree.feature[node] = f
        tree.threshold[node] = thresh
        tree.left[node] = recurse(idx[go_left], depth + 1)
        tree.right[node] = recurse(idx[~go_left], depth + 1)
        return node

    recurse(np.arange(len(y)), 0)
    return tree.finish()


class DecisionTreeClassifier(Classifier):
    """Greedy CART-style tree on Gini impurity with midpoint thresholds."""

    KIND = "dtree"

    def __init__(self, max_depth=12, min_leaf=5):
        super().__init__()
        if max_depth < 1 or min_leaf < 1:
            raise BadHyperparam(
                f"max_depth/min_leaf must be >= 1, got {max_depth}/{min_leaf}")
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.tree = None

    def _fit(self, x, y, seed):
        self.tree = _grow_tree(x, y, self.max_depth, self.min_leaf)

    def _proba(self, x):
        return self.tree.proba(x)

    def to_state(self):
        return {"max_depth": self.max_depth, "min_leaf": self.min_leaf,
                "tree": self.tree.to_state()}

    @classmethod
    def from_state(cls, state):
        c = cls(max_depth=state["max_depth"], min_leaf=state["min_leaf"])
        c.tree = _Tree.from_state(state["tree"])
        c.fitted = True
        return c


class _Forest(Classifier):
    """Shared machinery for the two tree ensembles."""

    BOOTSTRAP = True
    RANDOM_THRESHOLDS = False

    def __init__(self, n_trees=100, max_depth=12, min_leaf=5):
        super().__init__()
        if n_trees < 1:
            raise BadHyperparam(f"n_trees must be >= 1, got {n_trees}")
        if max_depth < 1 or min_leaf < 1:
            raise BadHyperparam(
                f"max_depth/min_leaf must be >= 1, got {max_depth}/{min_leaf}")
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.trees = None

    def _fit(self, x, y, seed):
        n, d = x.shape
        max_features = int(np.ceil(np.sqrt(d)))
        self.trees = []
        # one independent stream per tree keeps the forest order-deterministic
        for child_seed in np.random.SeedSequence(seed).spawn(self.n_trees):
            rng = np.random.default_rng(child_seed)
            if self.BOOTSTRAP:
                idx = rng.integers(0, n, size=n)
                xt, yt = x[idx], y[idx]
            else:
                xt, yt = x, y
            self.trees.append(_grow_tree(
                xt, yt, self.max_depth, self.min_leaf, rng=rng,
                max_features=max_features,
                random_thresholds=self.RANDOM_THRESHOLDS))

    def _proba(self, x):
        total = np.zeros(x.shape[0], dtype=np.float64)
        for tree in self.trees:
            total += tree.proba(x)
        return total / len(self.trees)

    def to_state(self):
        return {"n_trees": self.n_trees, "max_depth": self.max_depth,
                "min_leaf": self.min_leaf,
                "trees": [t.to_state() for t in self.trees]}

    @classmethod
    def from_state(cls, state):
        c = cls(n_trees=state["n_trees"], max_depth=state["max_depth"],
                min_leaf=state["min_leaf"])
        c.trees = [_Tree.from_state(s) for s in state["trees"]]
        c.fitted = True
        return c


class RandomForestClassifier(_Forest):
    """Bootstrapped trees, ceil(sqrt(d)) candidate features per split."""

    KIND = "rforest"
    BOOTSTRAP = True
    RANDOM_THRESHOLDS = False


class ExtraTreesClassifier(_Forest):
    """No bootstrap; both the candidate features and the cut points are random."""

    KIND = "xtrees"
    BOOTSTRAP = False
    RANDOM_THRESHOLDS = True


class LinearSVMClassifier(Classifier):
    """Maximum-margin linear separator trained by projected subgradient descent.

    Minimizes mean hinge loss + lambda * ||w||^2 with full-batch steps,
    step size 1/(2*lambda*t), and projection onto the ball of radius
    1/sqrt(lambda). The bias rides along as a constant input feature.
    predict_proba is a sigmoid of the margin.
    """

    KIND = "linsvm"

    def __init__(self, lam=1e-4, epochs=50):
        super().__init__()
        if lam <= 0 or epochs < 1:
            raise BadHyperparam(f"need lam > 0 and epochs >= 1, "
                                f"got {lam}/{epochs}")
        self.lam = lam
        self.epochs = epochs
        self.w = None

    def _fit(self, x, y, seed):
        xa = np.hstack([x, np.ones((x.shape[0], 1))])
        ypm = np.where(y == 1, 1.0, -1.0)
        w = np.zeros(xa.shape[1], dtype=np.float64)
        radius = 1.0 / np.sqrt(self.lam)
        for t in range(1, self.epochs + 1):
            margins = ypm * (xa @ w)
            viol = margins < 1.0
            grad = 2.0 * self.lam * w
            if np.any(viol):
                grad -= (ypm[viol, None] * xa[viol]).sum(axis=0) / len(ypm)
            w -= grad / (2.0 * self.lam * t)
            norm = np.linalg.norm(w)
            if norm > radius:
                w *= radius / norm
        self.w = w

    def decision_function(self, x):
        if not self.fitted:
            raise NotFitted("LinearSVMClassifier used before fit()")
        x = np.asarray(x, dtype=np.float64)
        return x @ self.w[:-1] + self.w[-1]

    def _proba(self, x):
        z = self.decision_function(x)
        out = np.empty_like(z)
        pos = z >= 0
        out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
        ez = np.exp(z[~pos])
        out[~pos] = ez / (1.0 + ez)
        return out

    def to_state(self):
        return {"lam": self.lam, "epochs": self.epochs,
                "w": encode_array(self.w)}

    @classmethod
    def from_state(cls, state):
        c = cls(lam=state["lam"], epochs=state["epochs"])
        c.w = decode_array(state["w"])
        c.fitted = True
        return c


CLASSIFIERS = {cls.KIND: cls for cls in (
    RandomClassifier, KNNClassifier, GaussianNBClassifier,
    DecisionTreeClassifier, RandomForestClassifier, ExtraTreesClassifier,
    LinearSVMClassifier)}
