"""Split documents into per-topic subdocuments: term-topic posterior,
renormalization over a selected topic subset, and integer frequency
distribution with rounding repair."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import Document
from .errors import ZeroDenominator
from .lda import TopicModel
from .topicselect import SortedTopicDist, Strategy, select_count


@dataclass(frozen=True)
class Subdocument:
    doc_id: str
    topic_id: int
    term_counts: dict[int, int]

    @property
    def length(self) -> int:
        return sum(self.term_counts.values())


def topic_posterior(model: TopicModel, d: Document, t: int) -> np.ndarray:
    """p(x | t, d) over all k topics: phi[x, t] * theta[d, x], normalized."""
    weights = model.phi[:, t] * model.theta_of(d.doc_id)
    total = weights.sum()
    if total <= 0.0:
        raise ZeroDenominator(
            f"term {t} has zero joint mass in document {d.doc_id!r}"
        )
    return weights / total


def renormalized_posterior(
    model: TopicModel, d: Document, t: int, selected: list[int]
) -> np.ndarray:
    """p(x | t, d) restricted to the selected topics and renormalized;
    mass of discarded topics is reassigned to the kept ones."""
    theta = model.theta_of(d.doc_id)
    sel = np.asarray(selected, dtype=np.int64)
    weights = model.phi[sel, t] * theta[sel]
    total = weights.sum()
    if total <= 0.0:
        raise ZeroDenominator(
            f"term {t} has zero joint mass on the selected topics of {d.doc_id!r}"
        )
    return weights / total


def distribute_frequency(freq: int, probs: np.ndarray) -> np.ndarray:
    """Round freq * p_l half-up per entry, then repair the total: excess
    instances are removed from the least probable topics (only where a
    count remains), missing ones are added to the most probable topics,
    cycling if the discrepancy exceeds the number of topics."""
    probs = np.asarray(probs, dtype=np.float64)
    r = np.floor(freq * probs + 0.5).astype(np.int64)

    diff = int(r.sum()) - freq
    if diff == 0:
        return r

    # order: most probable first; equal probabilities keep lower index first
    order = np.argsort(-probs, kind="stable")
    if diff > 0:
        while diff > 0:
            removed = False
            for idx in order[::-1]:  # least probable first
                if r[idx] > 0:
                    r[idx] -= 1
                    diff -= 1
                    removed = True
                    if diff == 0:
                        break
            if not removed:  # cannot happen for valid input; guards a hang
                break
    else:
        while diff < 0:
            for idx in order:  # most probable first
                r[idx] += 1
                diff += 1
                if diff == 0:
                    break
    return r


def split_document(
    model: TopicModel, d: Document, strategy: Strategy
) -> list[Subdocument]:
    """Select the document's top topics by p(x|d) under the strategy,
    then distribute every term's frequency over them. The multiset union
    of the returned subdocuments equals the document exactly."""
    theta = model.theta_of(d.doc_id)
    dist = SortedTopicDist.from_distribution(theta)
    i_d = select_count(dist, strategy)
    selected = [int(x) for x in dist.topic_ids[:i_d]]

    sel = np.asarray(selected, dtype=np.int64)
    theta_sel = theta[sel]

    per_topic: dict[int, dict[int, int]] = {x: {} for x in selected}
    for t, freq in d.term_counts.items():
        weights = model.phi[sel, t] * theta_sel
        total = weights.sum()
        if total <= 0.0:
            raise ZeroDenominator(
                f"term {t} has zero joint mass on the selected topics of {d.doc_id!r}"
            )
        counts = distribute_frequency(freq, weights / total)
        for topic, c in zip(selected, counts):
            if c > 0:
                per_topic[topic][t] = int(c)

    return [
        Subdocument(doc_id=d.doc_id, topic_id=topic, term_counts=tc)
        for topic, tc in per_topic.items()
        if tc
    ]


def write_subdocument_dump(subdocs, vocabulary, path: str) -> None:
    """Debug dump: one line per (doc, topic, term, count)."""
    with open(path, "w", encoding="utf-8") as fh:
        for sd in subdocs:
            for tid in sorted(sd.term_counts):
                fh.write(
                    f"{sd.doc_id}\t{sd.topic_id}\t"
                    f"{vocabulary.term_of(tid)}\t{sd.term_counts[tid]}\n"
                )
