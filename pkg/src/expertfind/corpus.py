"""Corpus ingestion: normalization, bag-of-words documents, vocabulary,
and repeated random train/test partitions at the initiative level."""

from __future__ import annotations

import json
import math
import re
import unicodedata
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

import numpy as np

from .errors import AllDocumentsEmpty, MalformedConfig, TooFewInitiatives

_TOKEN_RE = re.compile(r"[^\W\d_]+", re.UNICODE)

# Registered stemmers, addressable by name from preprocess config files.
STEMMERS: dict[str, Callable[[str], str]] = {}


def register_stemmer(name: str, fn: Callable[[str], str]) -> None:
    STEMMERS[name] = fn


def _strip_plural_s(token: str) -> str:
    if len(token) > 3 and token.endswith("s"):
        return token[:-1]
    return token


register_stemmer("identity", lambda t: t)
register_stemmer("strip_plural_s", _strip_plural_s)


@dataclass(frozen=True)
class PreprocessConfig:
    stopwords: frozenset[str] = frozenset()
    stemmer: Callable[[str], str] = STEMMERS["identity"]
    min_df_fraction: float = 0.01

    @classmethod
    def from_file(cls, path: str) -> "PreprocessConfig":
        """Read a plain-text key-value file with keys stopword_file,
        stemmer and min_df_fraction (all optional)."""
        keys = {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise MalformedConfig(f"expected 'key = value': {line!r}")
                key, _, value = line.partition("=")
                keys[key.strip()] = value.strip()
        stopwords: frozenset[str] = frozenset()
        if "stopword_file" in keys and keys["stopword_file"]:
            with open(keys["stopword_file"], encoding="utf-8") as fh:
                stopwords = frozenset(w.strip() for w in fh if w.strip())
        stemmer_name = keys.get("stemmer", "identity")
        if stemmer_name not in STEMMERS:
            raise MalformedConfig(f"unknown stemmer {stemmer_name!r}")
        return cls(
            stopwords=stopwords,
            stemmer=STEMMERS[stemmer_name],
            min_df_fraction=float(keys.get("min_df_fraction", "0.01")),
        )


@dataclass(frozen=True)
class RawIntervention:
    initiative_id: str
    candidate_id: str
    committee_id: Optional[str]
    title: str
    subjects: tuple[str, ...]
    body: str

    def __post_init__(self):
        if not self.initiative_id or not self.candidate_id:
            raise ValueError("initiative_id and candidate_id must be non-empty")


@dataclass(frozen=True)
class Document:
    doc_id: str
    initiative_id: str
    candidate_id: str
    term_counts: dict[int, int]

    @property
    def length(self) -> int:
        return sum(self.term_counts.values())


class Vocabulary:
    """Bijection between term ids and term strings, with document
    frequencies. Term ids follow first-appearance order."""

    def __init__(self):
        self._term_to_id: dict[str, int] = {}
        self._id_to_term: list[str] = []
        self.doc_freq: dict[int, int] = {}

    def add(self, term: str) -> int:
        tid = self._term_to_id.get(term)
        if tid is None:
            tid = len(self._id_to_term)
            self._term_to_id[term] = tid
            self._id_to_term.append(term)
            self.doc_freq[tid] = 0
        return tid

    def id_of(self, term: str) -> Optional[int]:
        return self._term_to_id.get(term)

    def term_of(self, tid: int) -> str:
        return self._id_to_term[tid]

    def __len__(self) -> int:
        return len(self._id_to_term)

    def __contains__(self, term: str) -> bool:
        return term in self._term_to_id

    def terms(self) -> list[str]:
        return list(self._id_to_term)


@dataclass
class Corpus:
    documents: list[Document]
    vocabulary: Vocabulary
    skipped_doc_ids: list[str] = field(default_factory=list)

    @property
    def n_documents(self) -> int:
        return len(self.documents)

    @property
    def n_terms(self) -> int:
        return len(self.vocabulary)

    def initiative_ids(self) -> list[str]:
        seen: dict[str, None] = {}
        for doc in self.documents:
            seen.setdefault(doc.initiative_id, None)
        return list(seen)

    def candidate_ids(self) -> list[str]:
        seen: dict[str, None] = {}
        for doc in self.documents:
            seen.setdefault(doc.candidate_id, None)
        return list(seen)

    def nnz(self) -> int:
        """Number of nonzero entries of the document-term matrix."""
        return sum(len(d.term_counts) for d in self.documents)

    def restrict(self, initiative_ids: Iterable[str]) -> "Corpus":
        """Sub-corpus with only the given initiatives. Vocabulary (and
        term ids) are shared with the parent."""
        wanted = set(initiative_ids)
        docs = [d for d in self.documents if d.initiative_id in wanted]
        return Corpus(documents=docs, vocabulary=self.vocabulary)


@dataclass(frozen=True)
class CorpusPartition:
    train: frozenset[str]
    test: frozenset[str]
    seed: int


def normalize(text: str, config: PreprocessConfig) -> list[str]:
    """Lowercase, tokenize on non-letter boundaries, drop stopwords,
    apply the configured stemmer."""
    tokens = _TOKEN_RE.findall(unicodedata.normalize("NFC", text).lower())
    out = []
    for tok in tokens:
        if tok in config.stopwords:
            continue
        stemmed = config.stemmer(tok)
        if stemmed:
            out.append(stemmed)
    return out


def build_corpus(
    records: list[RawIntervention], config: PreprocessConfig
) -> tuple[Corpus, Vocabulary]:
    """Build one Document per (initiative, candidate) pair, then drop
    terms below the min-document-frequency threshold.

    Documents emptied by the filter are dropped and recorded in the
    corpus skip log. Term ids are assigned in first-appearance order
    over the surviving documents, so rebuilding from the same inputs is
    byte-identical.
    """
    if not records:
        raise ValueError("records must be non-empty")

    # Concatenate repeated (initiative, candidate) records, preserving
    # first-appearance order of the pairs.
    token_lists: dict[tuple[str, str], list[str]] = {}
    for rec in records:
        key = (rec.initiative_id, rec.candidate_id)
        token_lists.setdefault(key, []).extend(normalize(rec.body, config))

    n_docs = len(token_lists)
    min_df = math.ceil(config.min_df_fraction * n_docs)

    doc_freq: dict[str, int] = {}
    for tokens in token_lists.values():
        for term in set(tokens):
            doc_freq[term] = doc_freq.get(term, 0) + 1

    vocab = Vocabulary()
    documents = []
    skipped = []
    for (init_id, cand_id), tokens in token_lists.items():
        kept = [t for t in tokens if doc_freq[t] >= min_df]
        doc_id = f"{init_id}::{cand_id}"
        if not kept:
            skipped.append(doc_id)
            continue
        counts: dict[int, int] = {}
        for term in kept:
            tid = vocab.add(term)
            counts[tid] = counts.get(tid, 0) + 1
        for tid in counts:
            vocab.doc_freq[tid] += 1
        documents.append(
            Document(
                doc_id=doc_id,
                initiative_id=init_id,
                candidate_id=cand_id,
                term_counts=counts,
            )
        )

    if not documents:
        raise AllDocumentsEmpty("every document was filtered away")
    corpus = Corpus(documents=documents, vocabulary=vocab, skipped_doc_ids=skipped)
    return corpus, vocab


def make_partitions(
    corpus: Corpus, ratio: float, n_splits: int, seed: int
) -> list[CorpusPartition]:
    """n_splits independent random train/test partitions of the
    initiative set; every intervention of an initiative lands on the
    same side. Deterministic given the seed."""
    initiatives = sorted(corpus.initiative_ids())
    if len(initiatives) < 2:
        raise TooFewInitiatives(f"need >= 2 initiatives, have {len(initiatives)}")
    if not 0.0 < ratio < 1.0:
        raise ValueError("ratio must be in (0, 1)")
    n_train = int(math.floor(ratio * len(initiatives) + 0.5))
    n_train = min(max(n_train, 1), len(initiatives) - 1)

    rng = np.random.default_rng(seed)
    partitions = []
    for i in range(n_splits):
        perm = rng.permutation(len(initiatives))
        train = frozenset(initiatives[j] for j in perm[:n_train])
        test = frozenset(initiatives[j] for j in perm[n_train:])
        partitions.append(CorpusPartition(train=train, test=test, seed=seed))
    return partitions


# --- on-disk formats ---------------------------------------------------------


def read_interventions(path: str) -> list[RawIntervention]:
    """Read line-delimited UTF-8 records (one JSON object per line)."""
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedConfig(f"{path}:{lineno}: bad JSON: {exc}") from exc
            records.append(
                RawIntervention(
                    initiative_id=str(obj["initiative_id"]),
                    candidate_id=str(obj["candidate_id"]),
                    committee_id=obj.get("committee_id") or None,
                    title=obj.get("title", ""),
                    subjects=tuple(obj.get("subjects", [])),
                    body=obj.get("body", ""),
                )
            )
    return records


def write_interventions(records: Iterable[RawIntervention], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(
                json.dumps(
                    {
                        "initiative_id": rec.initiative_id,
                        "candidate_id": rec.candidate_id,
                        "committee_id": rec.committee_id or "",
                        "title": rec.title,
                        "subjects": list(rec.subjects),
                        "body": rec.body,
                    },
                    ensure_ascii=False,
                    sort_keys=True,
                )
                + "\n"
            )


def save_corpus(corpus: Corpus, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        header = {
            "n_documents": corpus.n_documents,
            "terms": corpus.vocabulary.terms(),
            "doc_freq": [corpus.vocabulary.doc_freq[i] for i in range(corpus.n_terms)],
            "skipped": corpus.skipped_doc_ids,
        }
        fh.write(json.dumps(header, ensure_ascii=False) + "\n")
        for doc in corpus.documents:
            fh.write(
                json.dumps(
                    {
                        "doc_id": doc.doc_id,
                        "initiative_id": doc.initiative_id,
                        "candidate_id": doc.candidate_id,
                        "counts": {str(k): v for k, v in sorted(doc.term_counts.items())},
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )


def load_corpus(path: str) -> Corpus:
    with open(path, encoding="utf-8") as fh:
        header = json.loads(fh.readline())
        vocab = Vocabulary()
        for term, df in zip(header["terms"], header["doc_freq"]):
            tid = vocab.add(term)
            vocab.doc_freq[tid] = df
        documents = []
        for line in fh:
            if not line.strip():
                continue
            obj = json.loads(line)
            documents.append(
                Document(
                    doc_id=obj["doc_id"],
                    initiative_id=obj["initiative_id"],
                    candidate_id=obj["candidate_id"],
                    term_counts={int(k): v for k, v in obj["counts"].items()},
                )
            )
    return Corpus(
        documents=documents, vocabulary=vocab, skipped_doc_ids=header.get("skipped", [])
    )


def write_skip_log(corpus: Corpus, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for doc_id in corpus.skipped_doc_ids:
            fh.write(doc_id + "\n")


def save_partitions(partitions: list[CorpusPartition], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for part in partitions:
            fh.write(
                json.dumps(
                    {
                        "train": sorted(part.train),
                        "test": sorted(part.test),
                        "seed": part.seed,
                    }
                )
                + "\n"
            )


def load_partitions(path: str) -> list[CorpusPartition]:
    partitions = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            obj = json.loads(line)
            partitions.append(
                CorpusPartition(
                    train=frozenset(obj["train"]),
                    test=frozenset(obj["test"]),
                    seed=obj["seed"],
                )
            )
    return partitions
