"""Five learners, four measures, the repeated cross-validation harness, and
random-forest feature importance.

CART, logistic regression and random forest are backed by scikit-learn with
the documented defaults; k-nearest-neighbor and Gaussian naive Bayes are
implemented here so distance ties break on the lower row index and the
variance floor is exactly 1e-9 times the largest feature variance. Every
model emits a positive-class score in [0, 1].
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from sklearn.ensemble import RandomForestClassifier
from sklearn.linear_model import LogisticRegression
from sklearn.tree import DecisionTreeClassifier

from .errors import DataError
from .features import (FeatureMatrix, Preprocessing, bow_matrix,
                       counts_for_vocabulary, log_transform, pca_fit)
from .properties import DEFECTIVE, PROPERTY_NAMES, PropertyRow

LEARNER_KINDS = ("cart", "knn", "logreg", "gnb", "rf")

MEASURES = ("precision", "recall", "auc", "f")

_MAX_FOLD_REDRAWS = 25


@dataclass(frozen=True)
class LearnerSpec:
    kind: str
    seed: int = 42
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in LEARNER_KINDS:
            raise ValueError(f"unknown learner kind {self.kind!r}")


@dataclass
class TrainedModel:
    spec: LearnerSpec
    preprocessing: Preprocessing | None
    n_features: int
    impl: object


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0


@dataclass
class LabeledDataset:
    """Rows of script id + label, with either property features or
    preprocessed bag-of-words tokens."""

    script_ids: list[str]
    labels: np.ndarray  # 1 defective, 0 neutral
    properties: FeatureMatrix | None = None
    tokens: list[list[str]] | None = None

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=int)
        if len(self.labels) != len(self.script_ids):
            raise ValueError("labels and script ids differ in length")


@dataclass
class EvalReport:
    learner: str
    features: str
    medians: dict[str, float]
    raw: dict[str, list[float]]
    seed: int
    folds: int
    repeats: int
    events: list[str] = field(default_factory=list)


def dataset_from_rows(rows: Sequence[PropertyRow]) -> LabeledDataset:
    """Labeled property rows into a dataset; every row must carry a label."""
    unlabeled = [r.script_path for r in rows if r.label is None]
    if unlabeled:
        raise DataError(f"unlabeled rows, first: {unlabeled[0]}")
    values = np.array([r.vector.as_tuple() for r in rows], dtype=float)
    values = values.reshape(len(rows), len(PROPERTY_NAMES))
    return LabeledDataset(
        script_ids=[r.script_path for r in rows],
        labels=np.array([1 if r.label == DEFECTIVE else 0 for r in rows]),
        properties=FeatureMatrix([r.script_path for r in rows],
                                 list(PROPERTY_NAMES), values),
    )


class _Constant:
    def __init__(self, score: float):
        self.score = score

    def scores(self, x: np.ndarray) -> np.ndarray:
        return np.full(x.shape[0], self.score)


class _SkProba:
    """Positive-class probability from a fitted scikit-learn classifier."""

    def __init__(self, clf):
        self.clf = clf
        self.pos_col = int(np.where(clf.classes_ == 1)[0][0])

    def scores(self, x: np.ndarray) -> np.ndarray:
        return self.clf.predict_proba(x)[:, self.pos_col]


class _Knn:
    """Uniform-vote nearest neighbors, Euclidean distance.

    Distance ties resolve to the lower training-row index via a stable sort;
    the score is the positive fraction among the k neighbors.
    """

    def __init__(self, x: np.ndarray, y: np.ndarray, k: int):
        self.x = x
        self.y = y
        self.k = min(k, len(y))

    def scores(self, x: np.ndarray) -> np.ndarray:
        d2 = ((x[:, None, :] - self.x[None, :, :]) ** 2).sum(axis=2)
        neighbors = np.argsort(d2, axis=1, kind="stable")[:, :self.k]
        return self.y[neighbors].mean(axis=1)


class _Gnb:
    """Per-class Gaussian likelihoods with a variance floor of 1e-9 times
    the largest pooled feature variance."""

    def __init__(self, x: np.ndarray, y: np.ndarray):
        self.classes = np.unique(y)
        max_var = float(x.var(axis=0).max())
        floor = 1e-9 * max_var if max_var > 0 else 1e-12
        self.log_priors = {}
        self.means = {}
        self.vars = {}
        for c in self.classes:
            rows = x[y == c]
            self.log_priors[c] = np.log(len(rows) / len(y))
            self.means[c] = rows.mean(axis=0)
            self.vars[c] = np.maximum(rows.var(axis=0), floor)

    def _log_likelihood(self, x: np.ndarray, c: int) -> np.ndarray:
        var = self.vars[c]
        ll = -0.5 * (np.log(2.0 * np.pi * var) + (x - self.means[c]) ** 2 / var)
        return self.log_priors[c] + ll.sum(axis=1)

    def scores(self, x: np.ndarray) -> np.ndarray:
        if 1 not in self.classes:
            return np.zeros(x.shape[0])
        if 0 not in self.classes:
            return np.ones(x.shape[0])
        ll0 = self._log_likelihood(x, 0)
        ll1 = self._log_likelihood(x, 1)
        return np.exp(ll1 - np.logaddexp(ll0, ll1))


def train(spec: LearnerSpec, x: FeatureMatrix, y,
          preprocessing: Preprocessing | None = None) -> TrainedModel:
    """Fit one learner; deterministic given (spec, x, y).

    Training data with a single class yields a constant-score model; for
    cart, logreg and rf this is reported as a warning.
    """
    xt = preprocessing.transform(x) if preprocessing is not None else x
    data = np.asarray(xt.values, dtype=float)
    if data.shape[0] < 2:
        raise ValueError("training needs at least two rows")
    if not np.isfinite(data).all():
        raise ValueError("non-finite feature value in training data")
    labels = np.asarray(y, dtype=int)
    if set(np.unique(labels)) - {0, 1}:
        raise ValueError("labels must be binary (0/1)")
    params = spec.params

    if len(np.unique(labels)) == 1:
        if spec.kind in ("cart", "logreg", "rf"):
            warnings.warn(f"single-class training data: {spec.kind} degrades "
                          "to a constant-score model")
        impl = _Constant(float(labels[0]))
    elif spec.kind == "cart":
        clf = DecisionTreeClassifier(
            criterion="gini",
            max_depth=params.get("max_depth"),
            min_samples_split=params.get("min_samples_split", 2),
            random_state=spec.seed,
        )
        impl = _SkProba(clf.fit(data, labels))
    elif spec.kind == "rf":
        clf = RandomForestClassifier(
            n_estimators=params.get("n_estimators", 100),
            criterion="gini",
            max_features=params.get("max_features", "sqrt"),
            bootstrap=params.get("bootstrap", True),
            random_state=spec.seed,
        )
        impl = _SkProba(clf.fit(data, labels))
    elif spec.kind == "logreg":
        clf = LogisticRegression(C=params.get("c", 1.0), tol=1e-6,
                                 max_iter=1000)
        impl = _SkProba(clf.fit(data, labels))
    elif spec.kind == "knn":
        k = int(params.get("k", 5))
        if k < 1:
            raise ValueError("k must be at least 1")
        impl = _Knn(data, labels, k)
    else:  # gnb
        impl = _Gnb(data, labels)
    return TrainedModel(spec=spec, preprocessing=preprocessing,
                        n_features=data.shape[1], impl=impl)


def predict_scores(model: TrainedModel, x: FeatureMatrix) -> np.ndarray:
    """Positive-class scores in [0, 1]; stored preprocessing applied first."""
    xt = (model.preprocessing.transform(x)
          if model.preprocessing is not None else x)
    data = np.asarray(xt.values, dtype=float)
    if data.shape[1] != model.n_features:
        raise ValueError(f"expected {model.n_features} features, "
                         f"got {data.shape[1]}")
    return np.clip(model.impl.scores(data), 0.0, 1.0)


def precision(c: ConfusionCounts) -> float:
    return c.tp / (c.tp + c.fp) if c.tp + c.fp else 0.0


def recall(c: ConfusionCounts) -> float:
    return c.tp / (c.tp + c.fn) if c.tp + c.fn else 0.0


def f_measure(c: ConfusionCounts) -> float:
    p, r = precision(c), recall(c)
    return 2.0 * p * r / (p + r) if p + r else 0.0


def confusion(predicted_positive, labels) -> ConfusionCounts:
    predicted = np.asarray(predicted_positive, dtype=bool)
    actual = np.asarray(labels, dtype=bool)
    return ConfusionCounts(
        tp=int(np.sum(predicted & actual)),
        fp=int(np.sum(predicted & ~actual)),
        tn=int(np.sum(~predicted & ~actual)),
        fn=int(np.sum(~predicted & actual)),
    )


def auc(scores, labels) -> float:
    """Probability a random positive outscores a random negative, ties 1/2.

    Computed from midranks, so it equals U / (n_pos * n_neg) exactly.
    """
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=int)
    n_pos = int(labels.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs both classes")
    order = np.argsort(scores, kind="mergesort")
    ranks = np.empty(len(scores))
    i = 0
    while i < len(scores):
        j = i
        while j + 1 < len(scores) and scores[order[j + 1]] == scores[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    rank_sum = float(ranks[labels == 1].sum())
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def _stratified_folds(labels: np.ndarray, folds: int, seed: int,
                      events: list[str]) -> np.ndarray:
    """Assign rows to folds, classes spread round-robin after a shuffle.

    If some training set would miss a class entirely the assignment is
    redrawn with the next seed (recorded); structurally impossible cases
    fail after a bounded number of attempts.
    """
    for attempt in range(_MAX_FOLD_REDRAWS):
        rng = np.random.RandomState(seed + attempt)
        assignment = np.empty(len(labels), dtype=int)
        offset = 0
        for cls in np.unique(labels):
            idx = np.flatnonzero(labels == cls)
            rng.shuffle(idx)
            assignment[idx] = (np.arange(len(idx)) + offset) % folds
            offset += len(idx)
        ok = all(len(np.unique(labels[assignment != f])) == 2
                 for f in range(folds))
        if ok:
            if attempt:
                events.append(f"fold assignment redrawn {attempt} time(s) "
                              f"for seed {seed}")
            return assignment
    raise DataError("could not build folds where every training set "
                    "contains both classes")


def _fold_features(feature_set: str, dataset: LabeledDataset,
                   train_idx: np.ndarray, test_idx: np.ndarray,
                   variance_target: float):
    """Fit fold preprocessing on the training rows only."""
    if feature_set == "properties":
        base = dataset.properties
        sub = lambda idx: FeatureMatrix([base.row_ids[i] for i in idx],
                                        list(base.col_names),
                                        base.values[idx])
        x_train, x_test = sub(train_idx), sub(test_idx)
        pca = pca_fit(log_transform(x_train), variance_target)
        prep = Preprocessing(log=True, pca=pca)
    elif feature_set == "bow":
        ids = dataset.script_ids
        train_corpus = {ids[i]: dataset.tokens[i] for i in train_idx}
        vocabulary = bow_matrix(train_corpus).col_names
        x_train = counts_for_vocabulary(train_corpus, vocabulary)
        x_test = counts_for_vocabulary(
            {ids[i]: dataset.tokens[i] for i in test_idx}, vocabulary)
        prep = Preprocessing(vocabulary=tuple(vocabulary))
    else:
        raise ValueError(f"unknown feature set {feature_set!r}")
    return x_train, x_test, prep


def cross_validate(spec: LearnerSpec, feature_set: str,
                   dataset: LabeledDataset, seed: int,
                   folds: int = 10, repeats: int = 10,
                   variance_target: float = 0.95) -> EvalReport:
    """Repeated stratified k-fold evaluation with median reporting.

    Preprocessing is refit on the training folds of every split. Confusion
    counts use the 0.5 score threshold. Repetition r draws its folds from
    seed + r, so a report is a pure function of its inputs.
    """
    labels = dataset.labels
    if len(labels) < 2 * folds:
        raise DataError(f"dataset too small for {folds}-fold evaluation")
    if len(np.unique(labels)) < 2:
        raise DataError("dataset must contain both classes")
    if feature_set == "properties" and dataset.properties is None:
        raise DataError("dataset has no property features")
    if feature_set == "bow" and dataset.tokens is None:
        raise DataError("dataset has no token lists")

    events: list[str] = []
    raw = {m: [] for m in MEASURES}
    for rep in range(repeats):
        assignment = _stratified_folds(labels, folds, seed + rep, events)
        rep_spec = replace(spec, seed=spec.seed + rep)
        for fold in range(folds):
            test_idx = np.flatnonzero(assignment == fold)
            train_idx = np.flatnonzero(assignment != fold)
            x_train, x_test, prep = _fold_features(
                feature_set, dataset, train_idx, test_idx, variance_target)
            model = train(rep_spec, x_train, labels[train_idx],
                          preprocessing=prep)
            scores = predict_scores(model, x_test)
            y_test = labels[test_idx]
            counts = confusion(scores >= 0.5, y_test)
            raw["precision"].append(precision(counts))
            raw["recall"].append(recall(counts))
            raw["f"].append(f_measure(counts))
            if len(np.unique(y_test)) == 2:
                raw["auc"].append(auc(scores, y_test))
            else:
                raw["auc"].append(0.5)
                events.append(f"single-class test fold (rep {rep}, "
                              f"fold {fold}): AUC recorded as 0.5")
    medians = {m: float(np.median(raw[m])) for m in MEASURES}
    return EvalReport(learner=spec.kind, features=feature_set,
                      medians=medians, raw=raw, seed=seed, folds=folds,
                      repeats=repeats, events=events)


def report_to_json(report: EvalReport) -> str:
    return json.dumps({
        "learner": report.learner,
        "features": report.features,
        "medians": report.medians,
        "raw": report.raw,
        "seed": report.seed,
        "folds": report.folds,
        "repeats": report.repeats,
    }, sort_keys=True, indent=2) + "\n"


def report_from_json(text: str) -> EvalReport:
    obj = json.loads(text)
    return EvalReport(learner=obj["learner"], features=obj["features"],
                      medians=dict(obj["medians"]),
                      raw={m: list(v) for m, v in obj["raw"].items()},
                      seed=int(obj["seed"]), folds=int(obj["folds"]),
                      repeats=int(obj["repeats"]))


def feature_importance_runs(dataset: LabeledDataset, seed: int = 42,
                            runs: int = 10) -> list[dict[str, float]]:
    """Per-run normalized Gini importance of the 12 properties.

    Each run fits a seeded random forest on the log-transformed (never
    PCA-reduced) property counts; importances sum to one per run.
    """
    if dataset.properties is None:
        raise DataError("dataset has no property features")
    if list(dataset.properties.col_names) != list(PROPERTY_NAMES):
        raise DataError("dataset does not carry the 12 property columns")
    if len(np.unique(dataset.labels)) < 2:
        raise DataError("feature importance needs both classes")
    x = log_transform(dataset.properties).values
    out = []
    for r in range(runs):
        clf = RandomForestClassifier(n_estimators=100, criterion="gini",
                                     max_features="sqrt", bootstrap=True,
                                     random_state=seed + r)
        clf.fit(x, dataset.labels)
        out.append(dict(zip(PROPERTY_NAMES,
                            (float(v) for v in clf.feature_importances_))))
    return out


def feature_importance(dataset: LabeledDataset, seed: int = 42,
                       runs: int = 10) -> list[tuple[str, float]]:
    """Median importance per property, sorted descending, ties alphabetical."""
    per_run = feature_importance_runs(dataset, seed, runs)
    medians = {name: float(np.median([run[name] for run in per_run]))
               for name in PROPERTY_NAMES}
    return sorted(medians.items(), key=lambda kv: (-kv[1], kv[0]))
