"""Synthetic corpora with planted topics, candidate expertise and
committee structure, so end-to-end behaviour is checkable at desk scale."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .corpus import RawIntervention
from .errors import InvalidSpec


def _default_committees() -> tuple[tuple[int, ...], ...]:
    # 6 committees in a chain over 7 topics; adjacent committees share
    # one topic, so cross-committee term ambiguity is real
    return tuple((c, c + 1) for c in range(6))


@dataclass(frozen=True)
class SynthSpec:
    n_topics: int = 7
    vocab_per_topic: int = 60
    shared_vocab: int = 50
    n_candidates: int = 42
    committees: tuple[tuple[int, ...], ...] = field(default_factory=_default_committees)
    docs_per_candidate: tuple[int, int] = (8, 40)
    doc_length: tuple[int, int] = (80, 200)
    topic_mixture_concentration: float = 0.3
    shared_word_fraction: float = 0.2
    # share of interventions a member makes in other committees'
    # initiatives, scattered uniformly; these dilute compiled profiles
    away_doc_fraction: float = 0.5
    # low-output members ("ghosts"): topically identical to productive
    # members but with too few interventions to be judged relevant
    ghosts_per_committee: int = 3
    ghost_docs: tuple[int, int] = (6, 9)
    seed: int = 0

    def validate(self) -> None:
        if self.n_topics < 2 or self.n_candidates < 1:
            raise InvalidSpec("need >= 2 topics and >= 1 candidate")
        if not self.committees:
            raise InvalidSpec("at least one committee required")
        for committee in self.committees:
            if not committee or any(not 0 <= t < self.n_topics for t in committee):
                raise InvalidSpec("committee topics out of range")
        if self.docs_per_candidate[0] > self.docs_per_candidate[1]:
            raise InvalidSpec("empty docs_per_candidate range")
        if self.doc_length[0] > self.doc_length[1]:
            raise InvalidSpec("empty doc_length range")
        if self.topic_mixture_concentration <= 0:
            raise InvalidSpec("concentration must be positive")


@dataclass
class SynthTruth:
    committee_of: dict[str, str]  # candidate -> committee id
    expertise: dict[str, tuple[int, ...]]  # candidate -> planted topics
    memberships: dict[str, set[str]]  # committee -> candidates
    initiative_committee: dict[str, str]
    doc_topic_counts: dict[str, dict[int, int]]  # doc -> planted token topics


def _letters(idx: int) -> str:
    # base-26 letter encoding; tokens must survive a letters-only tokenizer
    out = []
    idx += 1
    while idx:
        idx, rem = divmod(idx - 1, 26)
        out.append(chr(ord("a") + rem))
    return "".join(reversed(out))


def _topic_word(topic: int, idx: int) -> str:
    return f"topic{_letters(topic)}word{_letters(idx)}"


def _shared_word(idx: int) -> str:
    return f"sharedword{_letters(idx)}"


def generate(spec: SynthSpec) -> tuple[list[RawIntervention], SynthTruth]:
    """Plant per-topic unigram distributions, assign each candidate 1-3
    expertise topics through their committee, and sample documents with
    Dirichlet topic mixtures concentrated on the expertise."""
    spec.validate()
    rng = np.random.default_rng(spec.seed)

    # Zipf-like word weights inside a topic, plus a shared-word slice.
    topic_word_weights = 1.0 / np.arange(1, spec.vocab_per_topic + 1)
    topic_word_weights /= topic_word_weights.sum()
    shared_weights = None
    if spec.shared_vocab > 0:
        shared_weights = 1.0 / np.arange(1, spec.shared_vocab + 1)
        shared_weights /= shared_weights.sum()

    committee_ids = [f"committee{c}" for c in range(len(spec.committees))]
    truth = SynthTruth(
        committee_of={},
        expertise={},
        memberships={cid: set() for cid in committee_ids},
        initiative_committee={},
        doc_topic_counts={},
    )

    records: list[RawIntervention] = []
    roster: list[tuple[str, int, int, bool]] = []
    for i in range(spec.n_candidates):
        n_docs = int(
            rng.integers(spec.docs_per_candidate[0], spec.docs_per_candidate[1] + 1)
        )
        roster.append((f"mp{i:03d}", i % len(spec.committees), n_docs, False))
    for g in range(spec.ghosts_per_committee * len(spec.committees)):
        n_docs = int(rng.integers(spec.ghost_docs[0], spec.ghost_docs[1] + 1))
        roster.append(
            (f"mp{spec.n_candidates + g:03d}", g % len(spec.committees), n_docs, True)
        )

    init_counter = 0
    for cand, c_idx, n_docs, is_ghost in roster:
        committee = committee_ids[c_idx]
        topics = spec.committees[c_idx]
        expertise = tuple(topics)
        truth.committee_of[cand] = committee
        truth.expertise[cand] = expertise
        truth.memberships[committee].add(cand)
        for _ in range(n_docs):
            init_id = f"init{init_counter:05d}"
            init_counter += 1
            # productive members scatter part of their activity over the
            # other committees; ghosts only speak at home
            if (
                not is_ghost
                and len(spec.committees) > 1
                and rng.random() < spec.away_doc_fraction
            ):
                away_idx = int(rng.integers(len(spec.committees) - 1))
                if away_idx >= c_idx:
                    away_idx += 1
                doc_committee = committee_ids[away_idx]
                doc_topics = tuple(spec.committees[away_idx])
            else:
                doc_committee = committee
                doc_topics = expertise
            mixture = rng.dirichlet(
                [spec.topic_mixture_concentration] * len(doc_topics)
            )
            length = int(rng.integers(spec.doc_length[0], spec.doc_length[1] + 1))
            topic_choices = rng.choice(len(doc_topics), size=length, p=mixture)
            words = []
            topic_counts: dict[int, int] = {}
            for choice in topic_choices:
                topic = doc_topics[choice]
                topic_counts[topic] = topic_counts.get(topic, 0) + 1
                if shared_weights is not None and rng.random() < spec.shared_word_fraction:
                    widx = int(rng.choice(spec.shared_vocab, p=shared_weights))
                    words.append(_shared_word(widx))
                else:
                    widx = int(rng.choice(spec.vocab_per_topic, p=topic_word_weights))
                    words.append(_topic_word(topic, widx))

            # title reflects the intervention's topic blend; subjects
            # label its leading topics (thesaurus-style descriptors)
            title_words = []
            for choice in rng.choice(len(doc_topics), size=6, p=mixture):
                widx = int(rng.choice(spec.vocab_per_topic, p=topic_word_weights))
                title_words.append(_topic_word(doc_topics[choice], widx))
            title = " ".join(title_words)
            leading = np.argsort(-mixture, kind="stable")[:2]
            subjects = tuple(
                f"{_topic_word(doc_topics[t], 0)} {_topic_word(doc_topics[t], 1)}"
                for t in leading
            )

            records.append(
                RawIntervention(
                    initiative_id=init_id,
                    candidate_id=cand,
                    committee_id=doc_committee,
                    title=title,
                    subjects=subjects,
                    body=" ".join(words),
                )
            )
            truth.initiative_committee[init_id] = doc_committee
            truth.doc_topic_counts[f"{init_id}::{cand}"] = topic_counts

    return records, truth


def save_truth(truth: SynthTruth, path: str) -> None:
    """Line-delimited truth records, one JSON object per line."""
    with open(path, "w", encoding="utf-8") as fh:
        for cand in sorted(truth.expertise):
            fh.write(
                json.dumps(
                    {
                        "type": "candidate",
                        "candidate_id": cand,
                        "committee_id": truth.committee_of[cand],
                        "expertise_topics": list(truth.expertise[cand]),
                    }
                )
                + "\n"
            )
        for init_id in sorted(truth.initiative_committee):
            fh.write(
                json.dumps(
                    {
                        "type": "initiative",
                        "initiative_id": init_id,
                        "committee_id": truth.initiative_committee[init_id],
                    }
                )
                + "\n"
            )
        for doc_id in sorted(truth.doc_topic_counts):
            fh.write(
                json.dumps(
                    {
                        "type": "doc_topics",
                        "doc_id": doc_id,
                        "topic_counts": {
                            str(t): c
                            for t, c in sorted(truth.doc_topic_counts[doc_id].items())
                        },
                    }
                )
                + "\n"
            )


def load_memberships(path: str) -> dict[str, set[str]]:
    """Committee -> candidate sets from a truth file."""
    memberships: dict[str, set[str]] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            obj = json.loads(line)
            if obj.get("type") == "candidate":
                memberships.setdefault(obj["committee_id"], set()).add(
                    obj["candidate_id"]
                )
    return memberships
