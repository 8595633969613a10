"""Nonparametric validation suite.

One-sided Mann-Whitney U (exact for small tie-free samples, normal
approximation with tie and continuity corrections otherwise), Cliff's delta
with the Romano magnitude bands, an effect-size aware Scott-Knott ranking,
and Cohen's kappa with the Landis-Koch agreement labels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.stats import rankdata

# exact Mann-Whitney p-values up to this pooled size (tie-free samples only)
EXACT_MAX_N = 12

NEGLIGIBLE = "negligible"
SMALL = "small"
MEDIUM = "medium"
LARGE = "large"


@dataclass(frozen=True)
class StatConfig:
    alpha: float = 0.05

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")


@dataclass(frozen=True)
class TestResult:
    u_statistic: float
    p_value: float
    reject_null: bool


@dataclass(frozen=True)
class EffectSize:
    delta: float
    magnitude: str


@dataclass(frozen=True)
class KappaResult:
    kappa: float
    label: str


@dataclass(frozen=True)
class SKRanking:
    """Treatment groups ordered best first; names inside a group are sorted."""

    groups: tuple[tuple[str, ...], ...]

    def rank_of(self, name: str) -> int:
        for rank, group in enumerate(self.groups, start=1):
            if name in group:
                return rank
        raise KeyError(name)


def _u_statistic(x: np.ndarray, y: np.ndarray) -> float:
    """U for x against y from midranks; ties contribute 1/2 per pair."""
    n1 = len(x)
    ranks = rankdata(np.concatenate([x, y]))
    return float(ranks[:n1].sum() - n1 * (n1 + 1) / 2.0)


def mann_whitney_one_sided(x: Sequence[float], y: Sequence[float],
                           cfg: StatConfig = StatConfig()) -> TestResult:
    """Test whether x is stochastically greater than y.

    With a pooled size of at most EXACT_MAX_N and no ties the p-value is
    exact: the fraction of the C(n1+n2, n1) rank assignments whose U is at
    least the observed one. Otherwise the normal approximation is used with
    a tie-corrected variance and a 0.5 continuity correction.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size == 0 or y.size == 0:
        raise ValueError("samples must be non-empty")
    n1, n2 = len(x), len(y)
    n = n1 + n2
    pooled = np.concatenate([x, y])
    u = _u_statistic(x, y)

    has_ties = len(np.unique(pooled)) < n
    if n <= EXACT_MAX_N and not has_ties:
        base = n1 * (n1 + 1) // 2
        u_obs = round(u)  # integral when there are no ties
        hits = sum(1 for ranks in combinations(range(1, n + 1), n1)
                   if sum(ranks) - base >= u_obs)
        p = hits / math.comb(n, n1)
    else:
        _, counts = np.unique(pooled, return_counts=True)
        tie_term = float(np.sum(counts**3 - counts))
        sigma2 = n1 * n2 / 12.0 * ((n + 1) - tie_term / (n * (n - 1)))
        if sigma2 <= 0:
            p = 1.0  # every value identical: no evidence either way
        else:
            z = (u - n1 * n2 / 2.0 - 0.5) / math.sqrt(sigma2)
            p = 0.5 * math.erfc(z / math.sqrt(2.0))
    return TestResult(u_statistic=u, p_value=p, reject_null=p < cfg.alpha)


def magnitude_of(delta: float) -> str:
    """Romano bands: |d| > 0.47 large, > 0.33 medium, > 0.14 small."""
    d = abs(delta)
    if d > 0.47:
        return LARGE
    if d > 0.33:
        return MEDIUM
    if d > 0.14:
        return SMALL
    return NEGLIGIBLE


def cliffs_delta(x: Sequence[float], y: Sequence[float]) -> EffectSize:
    """delta = (#{x_i > y_j} - #{x_i < y_j}) / (|x| |y|), via the rank-sum U.

    2U - n1*n2 equals the pair surplus exactly because midranks contribute
    1/2 per tied pair.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size == 0 or y.size == 0:
        raise ValueError("samples must be non-empty")
    n1, n2 = len(x), len(y)
    delta = (2.0 * _u_statistic(x, y) - n1 * n2) / (n1 * n2)
    return EffectSize(delta=delta, magnitude=magnitude_of(delta))


def _median(sample) -> float:
    return float(np.median(np.asarray(sample, dtype=float)))


def scott_knott_esd(treatments: Mapping[str, Sequence[float]],
                    cfg: StatConfig = StatConfig()) -> SKRanking:
    """Partition treatments into ranks of indistinguishable performance.

    Treatments are ordered by median, best first. Each block is split at the
    point maximizing the between-group sum of squared median deviations; the
    split stands only when the concatenated halves differ significantly
    (one-sided Mann-Whitney at cfg.alpha) with a non-negligible Cliff's
    delta. Output is independent of the mapping's insertion order.
    """
    if not treatments:
        raise ValueError("at least one treatment required")
    samples = {name: np.asarray(s, dtype=float) for name, s in treatments.items()}
    for name, s in samples.items():
        if s.size == 0:
            raise ValueError(f"treatment {name!r} has an empty sample")
    medians = {name: _median(s) for name, s in samples.items()}
    order = sorted(samples, key=lambda name: (-medians[name], name))

    groups: list[tuple[str, ...]] = []

    def split(block: list[str]) -> None:
        if len(block) >= 2:
            grand = sum(medians[t] for t in block) / len(block)
            best_i, best_bss = 1, -math.inf
            for i in range(1, len(block)):
                left = [medians[t] for t in block[:i]]
                right = [medians[t] for t in block[i:]]
                bss = (len(left) * (sum(left) / len(left) - grand) ** 2
                       + len(right) * (sum(right) / len(right) - grand) ** 2)
                if bss > best_bss:
                    best_i, best_bss = i, bss
            top = np.concatenate([samples[t] for t in block[:best_i]])
            bottom = np.concatenate([samples[t] for t in block[best_i:]])
            test = mann_whitney_one_sided(top, bottom, cfg)
            effect = cliffs_delta(top, bottom)
            if test.reject_null and effect.magnitude != NEGLIGIBLE:
                split(block[:best_i])
                split(block[best_i:])
                return
        groups.append(tuple(sorted(block)))

    split(order)
    return SKRanking(groups=tuple(groups))


_KAPPA_BANDS = [(0.0, "poor"), (0.20, "slight"), (0.40, "fair"),
                (0.60, "moderate"), (0.80, "substantial"), (1.0, "almost perfect")]


def kappa_label(kappa: float) -> str:
    """Landis-Koch verbal band for a kappa value."""
    for upper, label in _KAPPA_BANDS:
        if kappa <= upper:
            return label
    return "almost perfect"


def cohens_kappa(a: Sequence, b: Sequence,
                 categories: Iterable | None = None) -> KappaResult:
    """Chance-corrected agreement between two raters over the same items.

    kappa = (p_o - p_e) / (1 - p_e) with p_e from the marginal rating
    frequencies. Defined as 1 when both raters are constant and identical.
    """
    a = list(a)
    b = list(b)
    if len(a) != len(b):
        raise ValueError("rating sequences differ in length")
    if not a:
        raise ValueError("rating sequences must be non-empty")
    if categories is not None:
        cats = set(categories)
        bad = [r for r in (*a, *b) if r not in cats]
        if bad:
            raise ValueError(f"rating {bad[0]!r} outside the category set")
    n = len(a)
    p_o = sum(1 for ra, rb in zip(a, b) if ra == rb) / n
    values = set(a) | set(b)
    p_e = sum((a.count(v) / n) * (b.count(v) / n) for v in values)
    if p_e == 1.0:
        kappa = 1.0
    else:
        kappa = (p_o - p_e) / (1.0 - p_e)
    return KappaResult(kappa=kappa, label=kappa_label(kappa))
