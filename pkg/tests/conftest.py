"""Shared fixtures: a tiny hand-built corpus with two planted topics and
a model trained on it, reused across the module test files."""

import numpy as np
import pytest

from expertfind.corpus import PreprocessConfig, RawIntervention, build_corpus
from expertfind.lda import train

SPORT_WORDS = ["goal", "match", "league", "striker", "referee", "stadium"]
FARM_WORDS = ["harvest", "tractor", "wheat", "barn", "livestock", "plough"]


def _doc_body(rng, words, length=60):
    weights = 1.0 / np.arange(1, len(words) + 1)
    weights /= weights.sum()
    picks = rng.choice(len(words), size=length, p=weights)
    return " ".join(words[i] for i in picks)


def make_planted_records(n_per_group=20, seed=7):
    """Two groups of candidates speaking from disjoint vocabularies."""
    rng = np.random.default_rng(seed)
    records = []
    for g, words in enumerate([SPORT_WORDS, FARM_WORDS]):
        for i in range(n_per_group):
            records.append(
                RawIntervention(
                    initiative_id=f"g{g}i{i:03d}",
                    candidate_id=f"cand{g}{i % 4}",
                    committee_id=f"comm{g}",
                    title=words[0],
                    subjects=(words[1],),
                    body=_doc_body(rng, words),
                )
            )
    return records


@pytest.fixture(scope="session")
def planted_records():
    return make_planted_records()


@pytest.fixture(scope="session")
def planted_corpus(planted_records):
    corpus, _ = build_corpus(planted_records, PreprocessConfig(min_df_fraction=0.0))
    return corpus


@pytest.fixture(scope="session")
def planted_model(planted_corpus):
    # small alpha so short planted documents can concentrate on one topic
    return train(planted_corpus, k=2, alpha=0.1, iterations=200, seed=0)
