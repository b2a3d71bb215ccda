"""Candidate profiles: topic-based term subprofiles built by merging
subdocuments, the four term/topic baselines, and profile-size statistics."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .corpus import Corpus, Document, Vocabulary
from .lda import TopicModel, train
from .splitter import split_document
from .topicselect import Strategy

MONOLITHIC_TOPIC = "all"
TINY_THRESHOLD = 50


@dataclass(frozen=True)
class Subprofile:
    candidate_id: str
    # int topic id for LDA subprofiles; sentinel string for baselines
    topic_id: int | str
    term_counts: dict[int, int]

    @property
    def size(self) -> int:
        return sum(self.term_counts.values())

    @property
    def key(self) -> str:
        return f"{self.candidate_id}::{self.topic_id}"


@dataclass(frozen=True)
class TopicProfile:
    candidate_id: str
    # doc_id of the underlying intervention for intervention-mode profiles
    source_id: str
    topic_vector: np.ndarray


@dataclass
class ProfileStats:
    total_subprofiles: int = 0
    avg_per_candidate: float = 0.0
    avg_size: float = 0.0
    tiny_count: int = 0
    tiny_fraction: float = 0.0
    # averages over candidates of their per-document subdocument counts
    subdoc_mean: float = 0.0
    subdoc_max: float = 0.0
    subdoc_min: float = 0.0


def _merge(into: dict[int, int], counts: dict[int, int]) -> None:
    for t, c in counts.items():
        into[t] = into.get(t, 0) + c


def build_lda_subprofiles(
    train_corpus: Corpus, model: TopicModel, strategy: Strategy
) -> tuple[list[Subprofile], dict[str, int]]:
    """Split every training document and merge each candidate's
    subdocuments per topic. Also returns the number of subdocuments
    produced per document (for Table-1-style statistics)."""
    merged: dict[tuple[str, int], dict[int, int]] = {}
    splits_per_doc: dict[str, int] = {}
    for doc in train_corpus.documents:
        subdocs = split_document(model, doc, strategy)
        splits_per_doc[doc.doc_id] = len(subdocs)
        for sd in subdocs:
            key = (doc.candidate_id, sd.topic_id)
            merged.setdefault(key, {})
            _merge(merged[key], sd.term_counts)

    subprofiles = [
        Subprofile(candidate_id=cand, topic_id=topic, term_counts=tc)
        for (cand, topic), tc in sorted(merged.items())
        if tc
    ]
    return subprofiles, splits_per_doc


def build_term_monolithic(train_corpus: Corpus) -> list[Subprofile]:
    """One profile per candidate concatenating all their interventions."""
    merged: dict[str, dict[int, int]] = {}
    for doc in train_corpus.documents:
        merged.setdefault(doc.candidate_id, {})
        _merge(merged[doc.candidate_id], doc.term_counts)
    return [
        Subprofile(candidate_id=cand, topic_id=MONOLITHIC_TOPIC, term_counts=tc)
        for cand, tc in sorted(merged.items())
    ]


def build_term_intervention(train_corpus: Corpus) -> list[Subprofile]:
    """Each candidate-document kept as its own subprofile; the
    initiative id serves as the sentinel topic id."""
    return [
        Subprofile(
            candidate_id=doc.candidate_id,
            topic_id=doc.initiative_id,
            term_counts=dict(doc.term_counts),
        )
        for doc in train_corpus.documents
    ]


def build_topic_profiles(
    train_corpus: Corpus,
    k: int,
    mode: str,
    alpha: Optional[float] = None,
    beta: float = 0.1,
    iterations: int = 1000,
    seed: int = 0,
) -> tuple[list[TopicProfile], TopicModel]:
    """Topic-space baselines. monolithic: train LDA over one compiled
    document per candidate; intervention: train over the individual
    interventions. Returns the profiles plus the model used (needed to
    fold queries into the same topic space)."""
    if mode not in ("monolithic", "intervention"):
        raise ValueError(f"mode must be monolithic or intervention, got {mode!r}")

    if mode == "monolithic":
        merged: dict[str, dict[int, int]] = {}
        for doc in train_corpus.documents:
            merged.setdefault(doc.candidate_id, {})
            _merge(merged[doc.candidate_id], doc.term_counts)
        compiled = [
            Document(
                doc_id=f"compiled::{cand}",
                initiative_id=f"compiled::{cand}",
                candidate_id=cand,
                term_counts=tc,
            )
            for cand, tc in sorted(merged.items())
        ]
        lda_input = Corpus(documents=compiled, vocabulary=train_corpus.vocabulary)
    else:
        lda_input = train_corpus

    model = train(lda_input, k=k, alpha=alpha, beta=beta, iterations=iterations, seed=seed)
    profiles = [
        TopicProfile(
            candidate_id=doc.candidate_id,
            source_id=doc.doc_id,
            topic_vector=model.theta[i],
        )
        for i, doc in enumerate(lda_input.documents)
    ]
    return profiles, model


def profile_stats(
    subprofiles: list[Subprofile],
    splits_per_doc: Optional[dict[str, int]] = None,
    doc_candidates: Optional[dict[str, str]] = None,
    tiny_threshold: int = TINY_THRESHOLD,
) -> ProfileStats:
    """Size statistics: totals, per-candidate averages, tiny-subprofile
    share, and (when split counts are supplied) the averages over
    candidates of the mean/max/min subdocuments per document."""
    stats = ProfileStats()
    if subprofiles:
        sizes = [sp.size for sp in subprofiles]
        candidates = {sp.candidate_id for sp in subprofiles}
        stats.total_subprofiles = len(subprofiles)
        stats.avg_per_candidate = len(subprofiles) / len(candidates)
        stats.avg_size = sum(sizes) / len(sizes)
        stats.tiny_count = sum(1 for s in sizes if s < tiny_threshold)
        stats.tiny_fraction = stats.tiny_count / len(subprofiles)

    if splits_per_doc and doc_candidates:
        per_candidate: dict[str, list[int]] = {}
        for doc_id, n in splits_per_doc.items():
            per_candidate.setdefault(doc_candidates[doc_id], []).append(n)
        means = [sum(v) / len(v) for v in per_candidate.values()]
        maxes = [max(v) for v in per_candidate.values()]
        mins = [min(v) for v in per_candidate.values()]
        stats.subdoc_mean = sum(means) / len(means)
        stats.subdoc_max = sum(maxes) / len(maxes)
        stats.subdoc_min = sum(mins) / len(mins)
    return stats


def format_stats_table(rows: dict[str, ProfileStats]) -> str:
    """Plain-text table with one row per system."""
    lines = [
        f"{'system':<16}{'#SP':>8}{'avg#SP':>10}{'avgSPsize':>12}"
        f"{'#tiny':>8}{'%tiny':>8}{'mean':>8}{'max':>8}{'min':>8}"
    ]
    for name, s in rows.items():
        lines.append(
            f"{name:<16}{s.total_subprofiles:>8}{s.avg_per_candidate:>10.2f}"
            f"{s.avg_size:>12.2f}{s.tiny_count:>8}{100 * s.tiny_fraction:>8.2f}"
            f"{s.subdoc_mean:>8.2f}{s.subdoc_max:>8.2f}{s.subdoc_min:>8.2f}"
        )
    return "\n".join(lines) + "\n"


# --- profile store -----------------------------------------------------------


def save_subprofiles(
    subprofiles: list[Subprofile], vocabulary: Vocabulary, directory: str, name: str
) -> str:
    """Write one line-delimited file (candidate_id, topic_id, term,
    count) per profile family."""
    os.makedirs(directory, exist_ok=True)
    path = os.path.join(directory, f"{name}.tsv")
    with open(path, "w", encoding="utf-8") as fh:
        for sp in subprofiles:
            for tid in sorted(sp.term_counts):
                fh.write(
                    f"{sp.candidate_id}\t{sp.topic_id}\t"
                    f"{vocabulary.term_of(tid)}\t{sp.term_counts[tid]}\n"
                )
    return path


def load_subprofiles(path: str, vocabulary: Vocabulary) -> list[Subprofile]:
    grouped: dict[tuple[str, str], dict[int, int]] = {}
    order: list[tuple[str, str]] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            cand, topic, term, count = line.rstrip("\n").split("\t")
            tid = vocabulary.id_of(term)
            if tid is None:
                tid = vocabulary.add(term)
            key = (cand, topic)
            if key not in grouped:
                grouped[key] = {}
                order.append(key)
            grouped[key][tid] = grouped[key].get(tid, 0) + int(count)
    out = []
    for cand, topic in order:
        topic_id: int | str = int(topic) if topic.lstrip("-").isdigit() else topic
        out.append(
            Subprofile(candidate_id=cand, topic_id=topic_id, term_counts=grouped[(cand, topic)])
        )
    return out
