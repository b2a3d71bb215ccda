"""Term-topic posterior, renormalization, integer frequency
distribution, and document splitting."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from expertfind.corpus import Document
from expertfind.lda import TopicModel
from expertfind.splitter import (
    distribute_frequency,
    renormalized_posterior,
    split_document,
    topic_posterior,
)
from expertfind.topicselect import Strategy


def toy_model(phi, theta, doc_ids):
    phi = np.asarray(phi, dtype=np.float64)
    theta = np.asarray(theta, dtype=np.float64)
    return TopicModel(
        k=phi.shape[0],
        phi=phi,
        theta=theta,
        doc_ids=doc_ids,
        alpha=1.0,
        beta=0.1,
        seed=0,
        iterations=0,
    )


def doc(doc_id, counts):
    return Document(
        doc_id=doc_id, initiative_id=doc_id, candidate_id="c", term_counts=counts
    )


class TestTopicPosterior:
    def test_symmetric_inputs(self):
        model = toy_model([[0.2, 0.8], [0.2, 0.8]], [[0.5, 0.5]], ["d"])
        post = topic_posterior(model, doc("d", {0: 1}), 0)
        assert post == pytest.approx([0.5, 0.5])

    def test_sums_to_one(self):
        model = toy_model([[0.1, 0.9], [0.7, 0.3], [0.4, 0.6]], [[0.2, 0.3, 0.5]], ["d"])
        for t in (0, 1):
            assert topic_posterior(model, doc("d", {t: 1}), t).sum() == pytest.approx(1.0)


class TestRenormalizedPosterior:
    def test_all_topics_equals_plain_posterior(self):
        model = toy_model([[0.1, 0.9], [0.7, 0.3], [0.4, 0.6]], [[0.2, 0.3, 0.5]], ["d"])
        d = doc("d", {1: 2})
        full = topic_posterior(model, d, 1)
        renorm = renormalized_posterior(model, d, 1, [0, 1, 2])
        assert renorm == pytest.approx(full)

    def test_single_selected_topic(self):
        model = toy_model([[0.1, 0.9], [0.7, 0.3]], [[0.4, 0.6]], ["d"])
        assert renormalized_posterior(model, doc("d", {0: 1}), 0, [1]) == pytest.approx([1.0])

    def test_hand_case_two_of_three(self):
        # p(t|x) = (0.1, 0.4, 0.5), p(x|d) = (0.6, 0.3, 0.1), top-2 selected
        model = toy_model([[0.1], [0.4], [0.5]], [[0.6, 0.3, 0.1]], ["d"])
        out = renormalized_posterior(model, doc("d", {0: 1}), 0, [0, 1])
        assert out == pytest.approx([1.0 / 3.0, 2.0 / 3.0])


class TestDistributeFrequency:
    PROBS = np.array([0.390, 0.225, 0.157, 0.077, 0.076, 0.075])

    def test_reference_freq_7(self):
        assert list(distribute_frequency(7, self.PROBS)) == [3, 2, 1, 1, 0, 0]

    def test_reference_freq_3(self):
        assert list(distribute_frequency(3, self.PROBS)) == [2, 1, 0, 0, 0, 0]

    def test_single_topic(self):
        assert list(distribute_frequency(5, np.array([1.0]))) == [5]

    @given(
        st.integers(1, 20),
        st.lists(st.floats(0.001, 1.0), min_size=1, max_size=8),
    )
    @settings(max_examples=300, deadline=None)
    def test_sums_to_freq_and_nonnegative(self, freq, raw):
        probs = np.asarray(raw) / sum(raw)
        out = distribute_frequency(freq, probs)
        assert out.sum() == freq
        assert (out >= 0).all()

    @given(
        st.integers(1, 20),
        st.lists(st.floats(0.001, 1.0), min_size=1, max_size=8),
    )
    @settings(max_examples=300, deadline=None)
    def test_close_to_unrounded(self, freq, raw):
        probs = np.asarray(raw) / sum(raw)
        out = distribute_frequency(freq, probs)
        # rounding puts each entry within 0.5 of freq*p; repair moves at
        # most the total rounding discrepancy off any single entry
        discrepancy = abs(int(np.floor(freq * probs + 0.5).sum()) - freq)
        assert np.abs(out - freq * probs).max() <= 0.5 + discrepancy + 1e-9


class TestSplitDocument:
    def test_euclidean_single_subdocument(self, planted_corpus, planted_model):
        for d in planted_corpus.documents[:10]:
            subdocs = split_document(planted_model, d, Strategy.EUCLIDEAN)
            assert len(subdocs) == 1
            assert subdocs[0].term_counts == d.term_counts
            top = int(np.argmax(planted_model.theta_of(d.doc_id)))
            assert subdocs[0].topic_id == top

    @pytest.mark.parametrize("strategy", list(Strategy))
    def test_reconstruction(self, planted_corpus, planted_model, strategy):
        for d in planted_corpus.documents:
            subdocs = split_document(planted_model, d, strategy)
            merged: dict[int, int] = {}
            for sd in subdocs:
                for t, c in sd.term_counts.items():
                    assert c >= 1
                    merged[t] = merged.get(t, 0) + c
            assert merged == d.term_counts

    def test_overlap_bounded_by_positive_topics(self, planted_corpus, planted_model):
        for d in planted_corpus.documents[:10]:
            subdocs = split_document(planted_model, d, Strategy.OVERLAP)
            npos = int((planted_model.theta_of(d.doc_id) > 0).sum())
            assert len(subdocs) <= npos
            assert sum(sd.length for sd in subdocs) == d.length

    def test_deterministic(self, planted_corpus, planted_model):
        d = planted_corpus.documents[0]
        a = split_document(planted_model, d, Strategy.SORENSEN)
        b = split_document(planted_model, d, Strategy.SORENSEN)
        assert [(s.topic_id, s.term_counts) for s in a] == [
            (s.topic_id, s.term_counts) for s in b
        ]
