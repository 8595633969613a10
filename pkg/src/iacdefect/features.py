"""Feature transforms for model building.

Property counts go through ln(1+x) and a standardized PCA keeping at least
95% of the variance. Script text goes through the bag-of-words pipeline:
comment removal, word extraction, case/underscore splitting, symbol and
numeral filtering, stop-word removal, Porter stemming, and token counting.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .lexer import WORD, SourceScript, strip_comments, tokenize
from .stemming import porter_stem

# cumulative-variance comparisons tolerate this much floating-point slack
_VARIANCE_EPS = 1e-9

# fixed embedded stop-word list; tokens are filtered after lowercasing and
# before stemming
STOP_WORDS = frozenset("""
a about above after again against all am an and any are as at be because
been before being below between both but by can cannot could did do does
doing down during each few for from further had has have having he her here
hers herself him himself his how i if in into is it its itself just me more
most my myself no nor not now of off on once only or other our ours
ourselves out over own same she should so some such than that the their
theirs them themselves then there these they this those through to too under
until up very was we were what when where which while who whom why will with
you your yours yourself yourselves
""".split())

# pure-alpha runs (camel and pascal aware) and pure-digit runs
_CASE_SPLIT_RE = re.compile(r"[A-Z]+(?=[A-Z][a-z])|[A-Z]?[a-z]+|[A-Z]+|[0-9]+")


@dataclass
class FeatureMatrix:
    row_ids: list[str]
    col_names: list[str]
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values)
        expected = (len(self.row_ids), len(self.col_names))
        if self.values.shape != expected:
            raise ValueError(f"matrix shape {self.values.shape} does not "
                             f"match ids {expected}")


@dataclass
class PCAModel:
    """Standardization constants plus the full eigenbasis; the first k
    components cover the requested variance share."""

    mean: np.ndarray
    scale: np.ndarray
    components: np.ndarray  # (n_components, n_features), orthonormal rows
    explained_variance: np.ndarray
    explained_variance_ratio: np.ndarray
    k: int
    col_names: list[str]


def log_transform(m: FeatureMatrix) -> FeatureMatrix:
    """Replace every value x by ln(1 + x); shape and names unchanged."""
    if np.any(m.values < 0):
        i, j = np.argwhere(m.values < 0)[0]
        raise ValueError(f"negative value at ({m.row_ids[i]}, {m.col_names[j]})")
    return FeatureMatrix(list(m.row_ids), list(m.col_names),
                         np.log1p(np.asarray(m.values, dtype=float)))


def pca_fit(m: FeatureMatrix, variance_target: float = 0.95) -> PCAModel:
    """Standardized principal components, eigenvalues descending.

    Columns are centered and divided by their sample standard deviation
    (zero-variance columns keep scale 1). k is the smallest component count
    whose cumulative explained-variance ratio reaches the target. Each
    component's largest-magnitude loading is made positive so the basis is
    deterministic.
    """
    x = np.asarray(m.values, dtype=float)
    if x.shape[0] < 2:
        raise ValueError("PCA needs at least two rows")
    if x.shape[1] < 1:
        raise ValueError("PCA needs at least one column")
    mean = x.mean(axis=0)
    scale = x.std(axis=0, ddof=1)
    scale[scale == 0] = 1.0
    z = (x - mean) / scale
    cov = np.cov(z, rowvar=False, ddof=1).reshape(z.shape[1], z.shape[1])
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    eigvals = np.clip(eigvals[order], 0.0, None)
    components = eigvecs[:, order].T
    for row in components:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    total = eigvals.sum()
    if total <= 0:
        raise ValueError("matrix has zero total variance")
    ratios = eigvals / total
    cumulative = np.cumsum(ratios)
    k = int(np.searchsorted(cumulative, variance_target - _VARIANCE_EPS) + 1)
    k = min(k, len(eigvals))
    return PCAModel(mean=mean, scale=scale, components=components,
                    explained_variance=eigvals, explained_variance_ratio=ratios,
                    k=k, col_names=list(m.col_names))


def pca_transform(model: PCAModel, m: FeatureMatrix) -> FeatureMatrix:
    """Project rows onto the first k components after centering and scaling."""
    if list(m.col_names) != list(model.col_names):
        raise ValueError("column names do not match the fitted matrix")
    z = (np.asarray(m.values, dtype=float) - model.mean) / model.scale
    projected = z @ model.components[:model.k].T
    names = [f"pc{i + 1}" for i in range(model.k)]
    return FeatureMatrix(list(m.row_ids), names, projected)


def pca_model_to_json(model: PCAModel) -> str:
    return json.dumps({
        "mean": model.mean.tolist(),
        "scale": model.scale.tolist(),
        "components": model.components.tolist(),
        "explained_variance": model.explained_variance.tolist(),
        "explained_variance_ratio": model.explained_variance_ratio.tolist(),
        "k": model.k,
        "col_names": list(model.col_names),
    }, sort_keys=True, indent=2) + "\n"


def pca_model_from_json(text: str) -> PCAModel:
    obj = json.loads(text)
    return PCAModel(
        mean=np.asarray(obj["mean"], dtype=float),
        scale=np.asarray(obj["scale"], dtype=float),
        components=np.asarray(obj["components"], dtype=float),
        explained_variance=np.asarray(obj["explained_variance"], dtype=float),
        explained_variance_ratio=np.asarray(obj["explained_variance_ratio"],
                                            dtype=float),
        k=int(obj["k"]),
        col_names=list(obj["col_names"]),
    )


def split_identifier(token: str) -> list[str]:
    """Split on underscores, camel and pascal boundaries, and digit runs."""
    return _CASE_SPLIT_RE.findall(token)


def bow_preprocess(script_text: str) -> list[str]:
    """Text to stemmed tokens: comments out, words split and filtered."""
    script = SourceScript(path="<text>", body=script_text)
    cleaned = SourceScript(path=script.path, body=strip_comments(script))
    tokens: list[str] = []
    for tok in tokenize(cleaned).tokens:
        if tok.kind != WORD:
            continue
        for piece in split_identifier(tok.text):
            if not any(c.isalpha() for c in piece):
                continue  # numeric literals and symbol leftovers
            word = piece.lower()
            if word in STOP_WORDS:
                continue
            tokens.append(porter_stem(word))
    return tokens


def bow_matrix(corpus: Mapping[str, Sequence[str]]) -> FeatureMatrix:
    """Token occurrence counts; columns are the sorted union of tokens."""
    vocabulary = sorted({tok for tokens in corpus.values() for tok in tokens})
    index = {tok: j for j, tok in enumerate(vocabulary)}
    values = np.zeros((len(corpus), len(vocabulary)), dtype=int)
    row_ids = list(corpus)
    for i, rid in enumerate(row_ids):
        for tok in corpus[rid]:
            values[i, index[tok]] += 1
    return FeatureMatrix(row_ids, vocabulary, values)


def counts_for_vocabulary(corpus: Mapping[str, Sequence[str]],
                          vocabulary: Sequence[str]) -> FeatureMatrix:
    """Counts restricted to a fixed vocabulary; unknown tokens are dropped."""
    index = {tok: j for j, tok in enumerate(vocabulary)}
    values = np.zeros((len(corpus), len(vocabulary)), dtype=int)
    row_ids = list(corpus)
    for i, rid in enumerate(row_ids):
        for tok in corpus[rid]:
            j = index.get(tok)
            if j is not None:
                values[i, j] += 1
    return FeatureMatrix(row_ids, list(vocabulary), values)


def write_bow_triplets(m: FeatureMatrix, path) -> None:
    """Persist a count matrix as script_id,token,count rows (zeros skipped)."""
    import csv

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["script_id", "token", "count"])
        for i, rid in enumerate(m.row_ids):
            for j, tok in enumerate(m.col_names):
                count = int(m.values[i, j])
                if count:
                    writer.writerow([rid, tok, count])


@dataclass
class Preprocessing:
    """Fitted per-training-set transforms applied before scoring."""

    log: bool = False
    pca: PCAModel | None = None
    vocabulary: tuple[str, ...] | None = None

    def transform(self, m: FeatureMatrix) -> FeatureMatrix:
        out = m
        if self.vocabulary is not None and list(out.col_names) != list(self.vocabulary):
            index = {c: j for j, c in enumerate(out.col_names)}
            values = np.zeros((len(out.row_ids), len(self.vocabulary)))
            for j, tok in enumerate(self.vocabulary):
                if tok in index:
                    values[:, j] = out.values[:, index[tok]]
            out = FeatureMatrix(list(out.row_ids), list(self.vocabulary), values)
        if self.log:
            out = log_transform(out)
        if self.pca is not None:
            out = pca_transform(self.pca, out)
        return out
