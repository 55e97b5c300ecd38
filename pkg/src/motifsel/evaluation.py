"""Selection statistics, binary feature matrices and a naive Bayes CV harness."""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from .graph import LabeledGraph
from .patterns import PatternSet

POSITIVE = "pos"


def selection_rate(before: int, after: int) -> float:
    if before <= 0:
        raise ValueError("selection rate needs a non-empty initial pattern set")
    if not (0 <= after <= before):
        raise ValueError(f"after ({after}) must lie in [0, before={before}]")
    return after * 100.0 / before


def size_distribution(patterns: PatternSet) -> Dict[int, int]:
    """Pattern count per number of edges."""
    return dict(sorted(Counter(p.size for p in patterns).items()))


@dataclass
class FeatureMatrix:
    graph_ids: List[str]
    columns: List[str]
    values: np.ndarray  # (graphs, patterns) uint8
    classes: List[Optional[str]]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["graph", "class"] + self.columns)
        for gid, cls, row in zip(self.graph_ids, self.classes, self.values):
            w.writerow([gid, cls or ""] + row.tolist())
        return buf.getvalue()

    def to_sparse(self) -> str:
        lines = []
        for gid, row in zip(self.graph_ids, self.values):
            lines.append(f"{gid}: " + " ".join(str(j) for j in np.flatnonzero(row)))
        return "\n".join(lines) + "\n"


def feature_matrix(patterns: PatternSet, graphs: Sequence[LabeledGraph]) -> FeatureMatrix:
    """Presence matrix straight from the (merged) occurrence sets."""
    rows = {g.id: k for k, g in enumerate(graphs)}
    pats = sorted(patterns.patterns, key=lambda p: p.code.key)
    values = np.zeros((len(graphs), len(pats)), dtype=np.uint8)
    for j, p in enumerate(pats):
        for gid in p.occurrences:
            if gid not in rows:
                raise KeyError(f"pattern {p.id or p.code} names unknown graph {gid!r}")
            values[rows[gid], j] = 1
    return FeatureMatrix([g.id for g in graphs], [str(p.code) for p in pats], values,
                         [g.tag for g in graphs])


# ---------------------------------------------------------------------------
# naive Bayes


class BernoulliNB:
    """Bernoulli naive Bayes with add-``alpha`` smoothing on a 0/1 matrix."""

    def __init__(self, alpha: float = 1.0):
        self.alpha = alpha

    def fit(self, X: np.ndarray, y: np.ndarray) -> "BernoulliNB":
        X = np.asarray(X, dtype=float)
        self.classes_ = np.unique(y)
        counts = np.array([(y == c).sum() for c in self.classes_], dtype=float)
        self.log_prior_ = np.log(counts / counts.sum())
        ones = np.array([X[y == c].sum(axis=0) for c in self.classes_])
        p = (ones + self.alpha) / (counts[:, None] + 2 * self.alpha)
        self.log_p_ = np.log(p)
        self.log_q_ = np.log1p(-p)
        return self

    def joint_log_likelihood(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        return self.log_prior_ + X @ self.log_p_.T + (1 - X) @ self.log_q_.T

    def predict(self, X: np.ndarray) -> np.ndarray:
        # first class wins ties
        return self.classes_[np.argmax(self.joint_log_likelihood(X), axis=1)]


@dataclass
class CvResult:
    tp: int
    fp: int
    tn: int
    fn: int
    auc: float
    folds: int
    runs: int
    seeds: List[int] = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def accuracy(self) -> float:
        return (self.tp + self.tn) / self.n

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def f_score(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p and r else 0.0

    def row(self) -> Dict[str, float]:
        return {"accuracy": self.accuracy, "precision": self.precision, "recall": self.recall,
                "f_score": self.f_score, "auc": self.auc}


def stratified_folds(y: np.ndarray, folds: int, rng: np.random.Generator) -> np.ndarray:
    """Fold index per row; each class is shuffled and dealt round-robin."""
    assign = np.empty(len(y), dtype=int)
    for c in np.unique(y):
        idx = np.flatnonzero(y == c)
        rng.shuffle(idx)
        assign[idx] = np.arange(len(idx)) % folds
    return assign


def rank_auc(scores: np.ndarray, positive: np.ndarray) -> float:
    """Mann-Whitney AUC with midranks for ties."""
    n_pos = int(positive.sum())
    n_neg = len(positive) - n_pos
    if n_pos == 0 or n_neg == 0:
        return float("nan")
    order = np.argsort(scores, kind="mergesort")
    ranks = np.empty(len(scores))
    sorted_scores = scores[order]
    i = 0
    while i < len(scores):
        j = i
        while j + 1 < len(scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2 + 1
        i = j + 1
    return float((ranks[positive].sum() - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg))


def naive_bayes_cv(m: FeatureMatrix, folds: int = 5, runs: int = 5, seed: int = 0,
                   positive: str = POSITIVE) -> CvResult:
    """Repeated stratified k-fold CV; confusion counts are pooled over runs and folds.

    Run ``r`` shuffles with seed ``seed + r``. AUC is computed per run on the
    pooled out-of-fold scores and averaged over runs.
    """
    y = np.array(m.classes, dtype=object)
    if any(c is None for c in y):
        raise ValueError("every graph needs a class tag")
    labels, counts = np.unique(y.astype(str), return_counts=True)
    if len(labels) != 2:
        raise ValueError(f"need exactly two classes, found {list(labels)}")
    if counts.min() < folds:
        raise ValueError(f"class {labels[counts.argmin()]!r} has {counts.min()} rows, fewer "
                         f"than {folds} folds")
    if positive not in labels:
        raise ValueError(f"positive class {positive!r} not present")
    y = y.astype(str)
    X = m.values.astype(float)
    is_pos = y == positive
    tp = fp = tn = fn = 0
    aucs = []
    seeds = [seed + r for r in range(runs)]
    for s in seeds:
        assign = stratified_folds(y, folds, np.random.default_rng(s))
        score = np.empty(len(y))
        for f in range(folds):
            test = assign == f
            nb = BernoulliNB(1.0).fit(X[~test], y[~test])
            jll = nb.joint_log_likelihood(X[test])
            pi = list(nb.classes_).index(positive)
            score[test] = jll[:, pi] - jll[:, 1 - pi]
            pred = nb.classes_[np.argmax(jll, axis=1)] == positive
            truth = is_pos[test]
            tp += int((pred & truth).sum())
            fp += int((pred & ~truth).sum())
            tn += int((~pred & ~truth).sum())
            fn += int((~pred & truth).sum())
        aucs.append(rank_auc(score, is_pos))
    return CvResult(tp, fp, tn, fn, float(np.mean(aucs)), folds, runs, seeds)
