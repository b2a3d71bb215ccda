"""Query-likelihood retrieval over subprofiles (Dirichlet smoothing)
plus cosine scoring of topic-space profiles."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DuplicateSubprofile, EmptyInput, ZeroVector
from .profiles import Subprofile, TopicProfile

DEFAULT_MU = 2000.0


@dataclass(frozen=True)
class Query:
    query_id: str
    term_ids: tuple[int, ...]  # multiset; same preprocessing as the corpus


@dataclass(frozen=True)
class ScoredHit:
    candidate_id: str
    topic_id: int | str
    score: float
    rank: int

    @property
    def key(self) -> str:
        return f"{self.candidate_id}::{self.topic_id}"


class Index:
    """Inverted index over subprofiles with the collection statistics
    needed for Dirichlet smoothing. Immutable after construction."""

    def __init__(self, subprofiles: list[Subprofile]):
        if not subprofiles:
            raise EmptyInput("cannot index an empty subprofile list")
        self.subprofiles = list(subprofiles)
        keys = [sp.key for sp in subprofiles]
        if len(set(keys)) != len(keys):
            raise DuplicateSubprofile("subprofile ids must be unique")
        self.postings: dict[int, list[tuple[int, int]]] = {}
        self.lengths = [sp.size for sp in subprofiles]
        self.collection_tf: dict[int, int] = {}
        for i, sp in enumerate(subprofiles):
            for tid, c in sp.term_counts.items():
                self.postings.setdefault(tid, []).append((i, c))
                self.collection_tf[tid] = self.collection_tf.get(tid, 0) + c
        self.collection_length = sum(self.lengths)


def build_index(subprofiles: list[Subprofile]) -> Index:
    return Index(subprofiles)


def lm_score(q: Query, sp_index: int, index: Index, mu: float = DEFAULT_MU) -> float:
    """Query log-likelihood of one subprofile under Dirichlet smoothing;
    query terms unseen in the whole collection are skipped."""
    sp = index.subprofiles[sp_index]
    length = index.lengths[sp_index]
    score = 0.0
    for tid in q.term_ids:
        ctf = index.collection_tf.get(tid, 0)
        if ctf == 0:
            continue
        p_coll = ctf / index.collection_length
        c = sp.term_counts.get(tid, 0)
        score += math.log((c + mu * p_coll) / (length + mu))
    return score


def search(
    q: Query, index: Index, mu: float = DEFAULT_MU, top_n: int = 1000
) -> list[ScoredHit]:
    """Score every subprofile sharing at least one query term; sort by
    score descending, ties by subprofile id ascending."""
    if top_n < 1:
        raise ValueError("top_n must be >= 1")
    candidates: set[int] = set()
    for tid in set(q.term_ids):
        for sp_i, _ in index.postings.get(tid, ()):
            candidates.add(sp_i)
    scored = [
        (-lm_score(q, i, index, mu), index.subprofiles[i].key, i) for i in candidates
    ]
    scored.sort()
    hits = []
    for rank, (neg, _, i) in enumerate(scored[:top_n], start=1):
        sp = index.subprofiles[i]
        hits.append(
            ScoredHit(
                candidate_id=sp.candidate_id,
                topic_id=sp.topic_id,
                score=-neg,
                rank=rank,
            )
        )
    return hits


def cosine_topic_search(
    q_vec: np.ndarray, profiles: list[TopicProfile], top_n: int = 1000
) -> list[ScoredHit]:
    """Rank topic-space profiles by cosine similarity to the query's
    topic vector."""
    q = np.asarray(q_vec, dtype=np.float64)
    qn = float(np.linalg.norm(q))
    if qn == 0.0:
        raise ZeroVector("query topic vector is all-zero")
    scored = []
    for p in profiles:
        v = p.topic_vector
        vn = float(np.linalg.norm(v))
        sim = float(np.dot(q, v) / (qn * vn)) if vn > 0 else 0.0
        scored.append((-sim, f"{p.candidate_id}::{p.source_id}", p))
    scored.sort(key=lambda t: (t[0], t[1]))
    hits = []
    for rank, (neg, _, p) in enumerate(scored[:top_n], start=1):
        hits.append(
            ScoredHit(
                candidate_id=p.candidate_id,
                topic_id=p.source_id,
                score=-neg,
                rank=rank,
            )
        )
    return hits


# --- run files ---------------------------------------------------------------


def write_run_lines(query_id: str, hits, run_tag: str, fh) -> None:
    """Standard run-line format: query_id Q0 target_id rank score tag."""
    for hit in hits:
        fh.write(
            f"{query_id} Q0 {hit.key} {hit.rank} {hit.score:.6f} {run_tag}\n"
        )
