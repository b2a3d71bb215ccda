"""Offline evaluation: query and qrel construction from the test
partition, NDCG@10 / P@10 / recall@nr, paired t-test, and the
normalized-entropy diversity analysis."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as scipy_stats

from .corpus import Corpus, PreprocessConfig, RawIntervention, Vocabulary, normalize
from .errors import EmptyQuery, SingleCategory, UndefinedForEmptyQrel
from .fusion import CandidateRanking
from .retrieval import Query, ScoredHit

DEFAULT_CUTOFF = 10
DEFAULT_MIN_INTERVENTIONS = 10


@dataclass(frozen=True)
class Qrel:
    query_id: str
    relevant: frozenset[str]

    @property
    def nr(self) -> int:
        return len(self.relevant)


def make_query(
    init: RawIntervention, config: PreprocessConfig, vocabulary: Vocabulary
) -> Query:
    """Title plus subject labels, preprocessed like the corpus; terms
    outside the vocabulary are dropped at lookup time."""
    text = " ".join([init.title, *init.subjects])
    tokens = normalize(text, config)
    if not tokens:
        raise EmptyQuery(f"initiative {init.initiative_id!r}: empty after preprocessing")
    tids = tuple(
        tid for tid in (vocabulary.id_of(t) for t in tokens) if tid is not None
    )
    if not tids:
        raise EmptyQuery(f"initiative {init.initiative_id!r}: no in-vocabulary terms")
    return Query(query_id=init.initiative_id, term_ids=tids)


def make_qrels(
    test_initiatives: list[RawIntervention],
    memberships: dict[str, set[str]],
    train_corpus: Corpus,
    min_interventions: int = DEFAULT_MIN_INTERVENTIONS,
) -> list[Qrel]:
    """Relevant candidates for a test initiative = members of its
    committee with at least min_interventions training documents;
    initiatives without a committee are dropped."""
    doc_counts: dict[str, int] = {}
    for doc in train_corpus.documents:
        doc_counts[doc.candidate_id] = doc_counts.get(doc.candidate_id, 0) + 1
    eligible = {c for c, n in doc_counts.items() if n >= min_interventions}

    qrels = []
    seen: set[str] = set()
    for init in test_initiatives:
        if init.initiative_id in seen:
            continue
        seen.add(init.initiative_id)
        if not init.committee_id:
            continue
        relevant = memberships.get(init.committee_id, set()) & eligible
        if relevant:
            qrels.append(Qrel(query_id=init.initiative_id, relevant=frozenset(relevant)))
    return qrels


def ndcg_at(ranking: CandidateRanking, qrel: Qrel, cutoff: int = DEFAULT_CUTOFF) -> float:
    """Binary-gain NDCG with a log2(i + 1) discount."""
    if qrel.nr == 0:
        raise UndefinedForEmptyQrel(qrel.query_id)
    dcg = 0.0
    for i, cand in enumerate(ranking.candidates()[:cutoff], start=1):
        if cand in qrel.relevant:
            dcg += 1.0 / math.log2(i + 1)
    idcg = sum(1.0 / math.log2(i + 1) for i in range(1, min(qrel.nr, cutoff) + 1))
    return dcg / idcg


def precision_at(ranking: CandidateRanking, qrel: Qrel, cutoff: int = DEFAULT_CUTOFF) -> float:
    if qrel.nr == 0:
        raise UndefinedForEmptyQrel(qrel.query_id)
    top = ranking.candidates()[:cutoff]
    return sum(1 for c in top if c in qrel.relevant) / cutoff


def recall_at_nr(ranking: CandidateRanking, qrel: Qrel) -> float:
    if qrel.nr == 0:
        raise UndefinedForEmptyQrel(qrel.query_id)
    top = ranking.candidates()[: qrel.nr]
    return sum(1 for c in top if c in qrel.relevant) / qrel.nr


def paired_t_test(per_query_a: list[float], per_query_b: list[float]) -> float:
    """Two-sided paired t-test p-value. Degenerate (zero-variance)
    difference vectors map to p = 1.0 when identical, 0.0 otherwise."""
    if len(per_query_a) != len(per_query_b) or len(per_query_a) < 2:
        raise ValueError("need two equal-length lists with >= 2 pairs")
    diffs = np.asarray(per_query_a) - np.asarray(per_query_b)
    sd = diffs.std(ddof=1)
    if sd == 0.0:
        return 1.0 if diffs[0] == 0.0 else 0.0
    t = diffs.mean() / (sd / math.sqrt(len(diffs)))
    return float(2.0 * scipy_stats.t.sf(abs(t), df=len(diffs) - 1))


def normalized_entropy(counts, n_categories: int | None = None) -> float:
    """Entropy of the count-normalized distribution divided by log of
    the number of categories; in [0, 1]."""
    counts = np.asarray(counts, dtype=np.float64)
    n = n_categories if n_categories is not None else len(counts)
    if n < 2:
        raise SingleCategory("normalized entropy needs >= 2 categories")
    total = counts.sum()
    if total <= 0:
        raise ValueError("counts must sum to >= 1")
    p = counts[counts > 0] / total
    return float(-(p * np.log(p)).sum() / math.log(n))


def entropy_scatter(
    hit_lists: dict[str, list[ScoredHit]],
    n_topics: int,
    n_candidates: int,
    top: int = 20,
) -> list[tuple[float, float]]:
    """Per query, normalized entropies of the topic and candidate
    distributions among the top subprofile hits (before fusion)."""
    points = []
    for query_id in sorted(hit_lists):
        hits = hit_lists[query_id][:top]
        if not hits:
            continue
        topic_counts: dict[int | str, int] = {}
        cand_counts: dict[str, int] = {}
        for h in hits:
            topic_counts[h.topic_id] = topic_counts.get(h.topic_id, 0) + 1
            cand_counts[h.candidate_id] = cand_counts.get(h.candidate_id, 0) + 1
        points.append(
            (
                normalized_entropy(list(topic_counts.values()), n_topics),
                normalized_entropy(list(cand_counts.values()), n_candidates),
            )
        )
    return points


# --- qrels / scatter files ---------------------------------------------------


def write_qrels(qrels: list[Qrel], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for qrel in sorted(qrels, key=lambda q: q.query_id):
            for cand in sorted(qrel.relevant):
                fh.write(f"{qrel.query_id} 0 {cand} 1\n")


def load_qrels(path: str) -> list[Qrel]:
    grouped: dict[str, set[str]] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            query_id, _, cand, rel = line.split()
            if int(rel) > 0:
                grouped.setdefault(query_id, set()).add(cand)
    return [Qrel(query_id=q, relevant=frozenset(s)) for q, s in sorted(grouped.items())]


def write_scatter(points: list[tuple[float, float]], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for topic_h, cand_h in points:
            fh.write(f"{topic_h:.6f} {cand_h:.6f}\n")
