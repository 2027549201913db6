"""Shared learners and statistics: seeded decision forest, one-way ANOVA, RMSE.

Everything here is self-contained so trained models are reproducible from a
seed alone. The forest is the single classifier used across the package
(text-similarity, stance, headline and quality models).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

FOREST_FORMAT_VERSION = 1


@dataclass
class Forest:
    trees: list[dict]
    n_trees: int
    seed: int
    class_labels: list
    n_features: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "version": FOREST_FORMAT_VERSION,
                "n_trees": self.n_trees,
                "seed": self.seed,
                "class_labels": self.class_labels,
                "n_features": self.n_features,
                "trees": self.trees,
            },
            sort_keys=True,
        )

    @staticmethod
    def from_json(text: str) -> "Forest":
        obj = json.loads(text)
        if obj.get("version") != FOREST_FORMAT_VERSION:
            raise ValueError(f"unsupported forest format: {obj.get('version')!r}")
        return Forest(
            trees=obj["trees"],
            n_trees=obj["n_trees"],
            seed=obj["seed"],
            class_labels=obj["class_labels"],
            n_features=obj["n_features"],
        )


def _gini(counts: np.ndarray) -> float:
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts / total
    return float(1.0 - np.dot(p, p))


def _best_split(X: np.ndarray, y_idx: np.ndarray, rows: np.ndarray,
                features: list[int], n_classes: int):
    """Return (feature, threshold, weighted gini) of the best valid split,
    or None when no listed feature separates the rows."""
    best = None
    n = len(rows)
    for f in features:
        vals = X[rows, f]
        order = np.argsort(vals, kind="stable")
        sv = vals[order]
        sy = y_idx[rows][order]
        left = np.zeros(n_classes)
        right = np.bincount(sy, minlength=n_classes).astype(float)
        for i in range(n - 1):
            left[sy[i]] += 1
            right[sy[i]] -= 1
            if sv[i] == sv[i + 1]:
                continue
            nl = i + 1
            nr = n - nl
            score = (nl * _gini(left) + nr * _gini(right)) / n
            if best is None or score < best[2]:
                thr = (sv[i] + sv[i + 1]) / 2.0
                best = (f, float(thr), score)
    return best


def _grow_tree(X: np.ndarray, y_idx: np.ndarray, rows: np.ndarray,
               rng: np.random.Generator, n_classes: int, m_try: int) -> dict:
    counts = np.bincount(y_idx[rows], minlength=n_classes)
    if counts.max() == len(rows):
        return {"label": int(np.argmax(counts))}
    n_feat = X.shape[1]
    sampled = sorted(rng.choice(n_feat, size=m_try, replace=False).tolist())
    split = _best_split(X, y_idx, rows, sampled, n_classes)
    if split is None and m_try < n_feat:
        # sampled features were all constant here; fall back to the full set
        split = _best_split(X, y_idx, rows, list(range(n_feat)), n_classes)
    if split is None:
        # identical rows with mixed labels: majority, ties to lowest index
        return {"label": int(np.argmax(counts))}
    f, thr, _ = split
    mask = X[rows, f] <= thr
    left = _grow_tree(X, y_idx, rows[mask], rng, n_classes, m_try)
    right = _grow_tree(X, y_idx, rows[~mask], rng, n_classes, m_try)
    return {"feature": int(f), "threshold": thr, "left": left, "right": right}


def train_forest(X, y, n_trees: int = 100, seed: int = 0) -> Forest:
    """Bagged CART forest: gini splits, no depth cap, leaves down to one row,
    ceil(sqrt(F)) candidate features per split. Rows are put in a canonical
    order before bootstrapping so training is invariant to input permutation.
    """
    Xa = np.asarray(X, dtype=float)
    if Xa.ndim != 2 or Xa.shape[0] == 0:
        raise ValueError("X must be a non-empty 2d matrix")
    if np.isnan(Xa).any():
        raise ValueError("X contains missing values; impute first")
    y = list(y)
    if len(y) != Xa.shape[0]:
        raise ValueError("X and y length mismatch")
    class_labels = sorted(set(y), key=repr)
    if len(class_labels) < 2:
        raise ValueError("need at least 2 classes")
    label_to_idx = {c: i for i, c in enumerate(class_labels)}

    order = sorted(range(len(y)), key=lambda i: (tuple(Xa[i]), repr(y[i])))
    Xc = Xa[order]
    y_idx = np.array([label_to_idx[y[i]] for i in order], dtype=int)

    n = Xc.shape[0]
    n_feat = Xc.shape[1]
    m_try = min(n_feat, math.ceil(math.sqrt(n_feat)))
    n_classes = len(class_labels)

    trees = []
    for child in np.random.SeedSequence(seed).spawn(n_trees):
        rng = np.random.Generator(np.random.PCG64(child))
        boot = np.sort(rng.integers(0, n, size=n))
        trees.append(_grow_tree(Xc, y_idx, boot, rng, n_classes, m_try))
    return Forest(trees=trees, n_trees=n_trees, seed=seed,
                  class_labels=class_labels, n_features=n_feat)


def _tree_vote(tree: dict, x) -> int:
    node = tree
    while "label" not in node:
        node = node["left"] if x[node["feature"]] <= node["threshold"] else node["right"]
    return node["label"]


def predict_proba(forest: Forest, x) -> dict:
    """Class distribution for one feature vector: share of trees voting
    for each label."""
    x = np.asarray(x, dtype=float)
    if x.shape != (forest.n_features,):
        raise ValueError(f"expected {forest.n_features} features, got {x.shape}")
    votes = np.zeros(len(forest.class_labels))
    for tree in forest.trees:
        votes[_tree_vote(tree, x)] += 1
    votes /= forest.n_trees
    return {c: float(votes[i]) for i, c in enumerate(forest.class_labels)}


def predict(forest: Forest, x):
    proba = predict_proba(forest, x)
    return max(forest.class_labels, key=lambda c: proba[c])


@dataclass
class AnovaResult:
    f_statistic: float
    p_value: float
    dof_between: int
    dof_within: int


def anova_f(groups) -> AnovaResult:
    """One-way F-test across groups. The within-group sum of squares uses
    the Bessel-corrected group variance scaled by group size, so the two
    triple groups {1,2,3} vs {7,8,9} score F = 36."""
    groups = [list(map(float, g)) for g in groups]
    if len(groups) < 2:
        raise ValueError("need at least 2 groups")
    if any(len(g) < 2 for g in groups):
        raise ValueError("every group needs at least 2 values")
    k = len(groups)
    n_total = sum(len(g) for g in groups)
    grand = sum(sum(g) for g in groups) / n_total
    dof_b = k - 1
    dof_w = n_total - k
    ssb = sum(len(g) * (sum(g) / len(g) - grand) ** 2 for g in groups)
    ssw = 0.0
    for g in groups:
        m = sum(g) / len(g)
        var = sum((v - m) ** 2 for v in g) / (len(g) - 1)
        ssw += len(g) * var
    if ssb <= 0.0:
        return AnovaResult(0.0, 1.0, dof_b, dof_w)
    if ssw <= 0.0:
        return AnovaResult(math.inf, 0.0, dof_b, dof_w)
    f = (ssb / dof_b) / (ssw / dof_w)
    p = f_survival(f, dof_b, dof_w)
    return AnovaResult(f, p, dof_b, dof_w)


def f_survival(f: float, d1: int, d2: int) -> float:
    """P(F > f) for the F-distribution, via the regularized incomplete beta."""
    if f <= 0:
        return 1.0
    x = d2 / (d2 + d1 * f)
    return betainc_reg(d2 / 2.0, d1 / 2.0, x)


def betainc_reg(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b) by continued fraction."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                + a * math.log(x) + b * math.log1p(-x))
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(a, b, x) / a
    return 1.0 - front * _beta_cf(b, a, 1.0 - x) / b


def _beta_cf(a: float, b: float, x: float, max_iter: int = 300,
             eps: float = 1e-15) -> float:
    # modified Lentz evaluation of the standard continued fraction
    tiny = 1e-300
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        num = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + num * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + num / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        num = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + num * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + num / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            return h
    raise ArithmeticError("incomplete beta did not converge")


def significance_stars(p: float) -> str:
    if p < 0.005:
        return "***"
    if p < 0.01:
        return "**"
    if p < 0.05:
        return "*"
    return ""


def rmse(a, b) -> float:
    a = list(map(float, a))
    b = list(map(float, b))
    if len(a) != len(b):
        raise ValueError("length mismatch")
    if not a:
        raise ValueError("empty vectors")
    return math.sqrt(sum((x - y) ** 2 for x, y in zip(a, b)) / len(a))


def _is_missing(v) -> bool:
    return v is None or (isinstance(v, float) and math.isnan(v))


@dataclass
class MedianImputer:
    """Fills missing cells with the column median seen at fit time and
    appends an is-missing flag column for every column that had gaps."""
    medians: list[float] = field(default_factory=list)
    flagged: list[int] = field(default_factory=list)

    def fit(self, rows) -> "MedianImputer":
        rows = [list(r) for r in rows]
        if not rows:
            raise ValueError("empty training matrix")
        n_cols = len(rows[0])
        self.medians = []
        self.flagged = []
        for j in range(n_cols):
            present = [float(r[j]) for r in rows if not _is_missing(r[j])]
            self.medians.append(float(np.median(present)) if present else 0.0)
            if len(present) < len(rows):
                self.flagged.append(j)
        return self

    def transform(self, row) -> list[float]:
        row = list(row)
        if len(row) != len(self.medians):
            raise ValueError("column count mismatch")
        out = [self.medians[j] if _is_missing(v) else float(v)
               for j, v in enumerate(row)]
        out.extend(1.0 if _is_missing(row[j]) else 0.0 for j in self.flagged)
        return out

    def fit_transform(self, rows) -> list[list[float]]:
        self.fit(rows)
        return [self.transform(r) for r in rows]
