"""Topic-count heuristics, Gibbs training, fold-in, persistence."""

import numpy as np
import pytest

from expertfind.corpus import Document
from expertfind.errors import EmptyCorpus, InvalidK, NoKnownTerms
from expertfind.lda import (
    KHeuristic,
    choose_k,
    fold_in,
    load_model,
    save_model,
    train,
)


class TestChooseK:
    def test_terms_docs_over_nnz_reference_value(self):
        assert choose_k(4208, 10025, 1702296, KHeuristic("terms_docs_over_nnz")) == 24

    def test_sqrt_half_n_reference_value(self):
        assert choose_k(1, 10025, 1, KHeuristic("sqrt_half_n")) == 70

    def test_fixed(self):
        assert choose_k(10, 10, 10, KHeuristic("fixed", 300)) == 300

    def test_clamped_to_two(self):
        assert choose_k(1, 2, 100, KHeuristic("terms_docs_over_nnz")) == 2

    def test_invalid_heuristic(self):
        with pytest.raises(ValueError):
            KHeuristic("nope")
        with pytest.raises(ValueError):
            KHeuristic("fixed", 1)

    def test_invalid_stats(self):
        with pytest.raises(ValueError):
            choose_k(0, 1, 1, KHeuristic("sqrt_half_n"))


class TestTrain:
    def test_separates_planted_groups(self, planted_corpus, planted_model):
        # two disjoint vocabularies must land on different topics
        major = {}
        for g in (0, 1):
            thetas = [
                planted_model.theta_of(d.doc_id)
                for d in planted_corpus.documents
                if d.initiative_id.startswith(f"g{g}")
            ]
            assert all(max(t) >= 0.9 for t in thetas)
            tops = {int(np.argmax(t)) for t in thetas}
            assert len(tops) == 1
            major[g] = tops.pop()
        assert major[0] != major[1]

    def test_phi_rows_normalized(self, planted_model):
        assert np.allclose(planted_model.phi.sum(axis=1), 1.0, atol=1e-9)
        assert (planted_model.phi >= 0).all()

    def test_theta_rows_normalized(self, planted_model):
        assert np.allclose(planted_model.theta.sum(axis=1), 1.0, atol=1e-9)
        assert (planted_model.theta >= 0).all()

    def test_deterministic(self, planted_corpus):
        m1 = train(planted_corpus, k=2, iterations=50, seed=5)
        m2 = train(planted_corpus, k=2, iterations=50, seed=5)
        assert np.array_equal(m1.phi, m2.phi)
        assert np.array_equal(m1.theta, m2.theta)

    def test_count_consistency_checked(self, planted_corpus):
        # check_counts exercises the in-sampler count audit
        train(planted_corpus, k=2, iterations=5, seed=0, check_counts=True)

    def test_perplexity_decreases(self, planted_corpus):
        _, trace = train(
            planted_corpus, k=2, iterations=100, seed=0, perplexity_every=10
        )
        sweeps = [s for s, _ in trace]
        assert sweeps[0] == 10 and sweeps[-1] == 100
        assert trace[-1][1] <= trace[0][1]

    def test_empty_corpus(self, planted_corpus):
        empty = type(planted_corpus)(documents=[], vocabulary=planted_corpus.vocabulary)
        with pytest.raises(EmptyCorpus):
            train(empty, k=2)

    def test_invalid_k(self, planted_corpus):
        with pytest.raises(InvalidK):
            train(planted_corpus, k=1)

    def test_alpha_default(self, planted_corpus):
        model = train(planted_corpus, k=5, iterations=2, seed=0)
        assert model.alpha == 10.0


class TestFoldIn:
    def test_training_document_close_to_theta_row(self, planted_corpus, planted_model):
        doc = planted_corpus.documents[0]
        vec = fold_in(planted_model, doc, seed=0)
        tv = 0.5 * np.abs(vec - planted_model.theta_of(doc.doc_id)).sum()
        assert tv < 0.15

    def test_normalized(self, planted_corpus, planted_model):
        vec = fold_in(planted_model, planted_corpus.documents[3], seed=1)
        assert vec.shape == (planted_model.k,)
        assert abs(vec.sum() - 1.0) < 1e-9

    def test_unknown_terms_only(self, planted_model):
        doc = Document(
            doc_id="q", initiative_id="q", candidate_id="", term_counts={10_000: 3}
        )
        with pytest.raises(NoKnownTerms):
            fold_in(planted_model, doc)

    def test_deterministic(self, planted_corpus, planted_model):
        doc = planted_corpus.documents[7]
        assert np.array_equal(
            fold_in(planted_model, doc, seed=9), fold_in(planted_model, doc, seed=9)
        )


class TestPersistence:
    def test_lossless_roundtrip(self, planted_model, tmp_path):
        path = str(tmp_path / "model.txt")
        save_model(planted_model, path)
        loaded = load_model(path)
        assert loaded.k == planted_model.k
        assert loaded.doc_ids == planted_model.doc_ids
        assert np.array_equal(loaded.phi, planted_model.phi)
        assert np.array_equal(loaded.theta, planted_model.theta)
        assert loaded.alpha == planted_model.alpha
        assert loaded.beta == planted_model.beta
