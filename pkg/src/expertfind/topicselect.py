"""Topic-count selection: decide how many of the most probable topics a
document keeps, via 15 distance/similarity measures between the sorted
probability vector p and the step vectors I_j, which collapse onto five
closed-form strategies."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DegenerateDistribution


class Strategy(Enum):
    EUCLIDEAN = "euclidean"
    DICE = "dice"
    SORENSEN = "sorensen"
    COSINE = "cosine"
    OVERLAP = "overlap"


class Measure(Enum):
    # similarities
    COSINE = "cosine"
    DICE = "dice"
    JACCARD = "jaccard"
    CZEKANOWSKI = "czekanowski"
    RUZICKA = "ruzicka"
    OVERLAP = "overlap"
    # distances
    EUCLIDEAN = "euclidean"
    HAMMING = "hamming"
    CHEBYSHEV = "chebyshev"
    SORENSEN_DIST = "sorensen_dist"
    SOERGEL = "soergel"
    KULCZYNSKI = "kulczynski"
    CAMBERRA = "camberra"
    DIVERGENCE = "divergence"
    NEYMAN = "neyman"


SIMILARITIES = frozenset(
    {
        Measure.COSINE,
        Measure.DICE,
        Measure.JACCARD,
        Measure.CZEKANOWSKI,
        Measure.RUZICKA,
        Measure.OVERLAP,
    }
)

# Which closed-form strategy each measure's argbest collapses to.
MEASURE_TO_STRATEGY = {
    Measure.COSINE: Strategy.COSINE,
    Measure.DICE: Strategy.DICE,
    Measure.JACCARD: Strategy.DICE,
    Measure.CZEKANOWSKI: Strategy.SORENSEN,
    Measure.RUZICKA: Strategy.SORENSEN,
    Measure.SORENSEN_DIST: Strategy.SORENSEN,
    Measure.SOERGEL: Strategy.SORENSEN,
    Measure.KULCZYNSKI: Strategy.SORENSEN,
    Measure.EUCLIDEAN: Strategy.EUCLIDEAN,
    Measure.HAMMING: Strategy.EUCLIDEAN,
    Measure.CHEBYSHEV: Strategy.EUCLIDEAN,
    Measure.NEYMAN: Strategy.EUCLIDEAN,
    Measure.OVERLAP: Strategy.OVERLAP,
    Measure.CAMBERRA: Strategy.OVERLAP,
    Measure.DIVERGENCE: Strategy.OVERLAP,
}


@dataclass(frozen=True)
class SortedTopicDist:
    """Probabilities sorted non-increasing, with the original topic
    indices carried alongside."""

    probs: np.ndarray
    topic_ids: np.ndarray

    @classmethod
    def from_distribution(cls, dist) -> "SortedTopicDist":
        p = np.asarray(dist, dtype=np.float64)
        order = np.argsort(-p, kind="stable")
        return cls(probs=p[order], topic_ids=order)

    @property
    def k(self) -> int:
        return len(self.probs)

    def n_positive(self) -> int:
        return int(np.sum(self.probs > 0.0))


def select_count(dist: SortedTopicDist, strategy: Strategy) -> int:
    """Number of leading topics to keep under the given strategy.
    Ties in the argmax break toward fewer topics."""
    npos = dist.n_positive()
    if npos == 0:
        raise DegenerateDistribution("all topic probabilities are zero")
    if strategy is Strategy.EUCLIDEAN:
        return 1
    if strategy is Strategy.OVERLAP:
        return npos

    p = dist.probs[:npos]
    cum = np.cumsum(p)
    j = np.arange(1, npos + 1, dtype=np.float64)
    if strategy is Strategy.COSINE:
        scores = cum / np.sqrt(j)
    elif strategy is Strategy.DICE:
        scores = cum / (j + float(np.dot(dist.probs, dist.probs)))
    else:  # Sorensen
        scores = cum / (j + 1.0)
    return int(np.argmax(scores)) + 1


def measure_scores(dist: SortedTopicDist, measure: Measure) -> np.ndarray:
    """Vector of Sim(p, I_j) or Dist(p, I_j) for j = 1..k, using the
    closed forms over the sorted vector. Divisions by zero surface as
    +inf (worst possible for the affected distances)."""
    p = dist.probs
    k = dist.k
    cum = np.cumsum(p)
    j = np.arange(1, k + 1, dtype=np.float64)
    sumsq = float(np.dot(p, p))

    with np.errstate(divide="ignore"):
        if measure is Measure.COSINE:
            return cum / (np.sqrt(j) * np.sqrt(sumsq))
        if measure is Measure.DICE:
            return 2.0 * cum / (j + sumsq)
        if measure is Measure.JACCARD:
            return cum / (j + sumsq - cum)
        if measure is Measure.CZEKANOWSKI:
            return 2.0 * cum / (j + 1.0)
        if measure is Measure.RUZICKA:
            return cum / (j + 1.0 - cum)
        if measure is Measure.OVERLAP:
            return cum.copy()
        if measure is Measure.EUCLIDEAN:
            return np.sqrt(np.maximum(j + sumsq - 2.0 * cum, 0.0))
        if measure is Measure.HAMMING:
            return j + 1.0 - 2.0 * cum
        if measure is Measure.CHEBYSHEV:
            return 1.0 - p
        if measure is Measure.SORENSEN_DIST:
            return 1.0 - 2.0 * cum / (j + 1.0)
        if measure is Measure.SOERGEL:
            return 1.0 - cum / (j + 1.0 - cum)
        if measure is Measure.KULCZYNSKI:
            return (j + 1.0) / cum - 2.0
        if measure is Measure.CAMBERRA:
            return np.cumsum((1.0 - p) / (1.0 + p)) + (k - j)
        if measure is Measure.DIVERGENCE:
            return 2.0 * np.cumsum((1.0 - p) ** 2 / (1.0 + p) ** 2) + 2.0 * (k - j)
        if measure is Measure.NEYMAN:
            inv = np.where(p > 0.0, 1.0 / np.where(p > 0.0, p, 1.0), np.inf)
            return np.cumsum(inv) + 1.0 - 2.0 * j
    raise ValueError(f"unknown measure {measure!r}")


def measure_score(dist: SortedTopicDist, j: int, measure: Measure) -> float:
    """Sim(p, I_j) or Dist(p, I_j) for one j (1-based)."""
    if not 1 <= j <= dist.k:
        raise ValueError(f"j must be in 1..{dist.k}, got {j}")
    return float(measure_scores(dist, measure)[j - 1])


def brute_force_select(dist: SortedTopicDist, measure: Measure) -> int:
    """Argbest over all j = 1..k, scoring every candidate; ties toward
    smaller j. Oracle counterpart of select_count."""
    if dist.n_positive() == 0:
        raise DegenerateDistribution("all topic probabilities are zero")
    scores = measure_scores(dist, measure)
    if measure in SIMILARITIES:
        return int(np.argmax(scores)) + 1
    return int(np.argmin(scores)) + 1
