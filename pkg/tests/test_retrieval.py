"""Inverted index, Dirichlet-smoothed query likelihood, cosine topic
search, and run-file output."""

import io
import math

import numpy as np
import pytest

from expertfind.errors import DuplicateSubprofile, EmptyInput, ZeroVector
from expertfind.profiles import Subprofile, TopicProfile
from expertfind.retrieval import (
    Query,
    build_index,
    cosine_topic_search,
    lm_score,
    search,
    write_run_lines,
)


def sp(cand, topic, counts):
    return Subprofile(candidate_id=cand, topic_id=topic, term_counts=counts)


@pytest.fixture
def toy_index():
    return build_index([sp("a", 1, {0: 2, 1: 2}), sp("b", 1, {1: 4})])


class TestIndex:
    def test_collection_stats(self, toy_index):
        assert toy_index.collection_length == 8
        assert toy_index.collection_tf == {0: 2, 1: 6}
        assert toy_index.lengths == [4, 4]

    def test_postings_recount(self, toy_index):
        for tid, posting in toy_index.postings.items():
            for i, c in posting:
                assert toy_index.subprofiles[i].term_counts[tid] == c

    def test_empty_input(self):
        with pytest.raises(EmptyInput):
            build_index([])

    def test_duplicate_ids(self):
        with pytest.raises(DuplicateSubprofile):
            build_index([sp("a", 1, {0: 1}), sp("a", 1, {1: 1})])


class TestLmScore:
    def test_hand_computed_smoothing(self, toy_index):
        q = Query(query_id="q", term_ids=(0,))
        assert lm_score(q, 0, toy_index, mu=1.0) == pytest.approx(math.log((2 + 0.25) / 5))
        assert lm_score(q, 1, toy_index, mu=1.0) == pytest.approx(math.log(0.25 / 5))

    def test_unseen_term_skipped(self, toy_index):
        q = Query(query_id="q", term_ids=(99,))
        assert lm_score(q, 0, toy_index) == 0.0

    def test_monotone_in_term_count(self, toy_index):
        q = Query(query_id="q", term_ids=(1,))
        assert lm_score(q, 1, toy_index) > lm_score(q, 0, toy_index)

    def test_order_invariant_and_linear_in_multiplicity(self, toy_index):
        a = Query(query_id="q", term_ids=(0, 1, 0))
        b = Query(query_id="q", term_ids=(0, 0, 1))
        assert lm_score(a, 0, toy_index) == pytest.approx(lm_score(b, 0, toy_index))
        single = Query(query_id="q", term_ids=(0,))
        double = Query(query_id="q", term_ids=(0, 0))
        assert lm_score(double, 0, toy_index) == pytest.approx(2 * lm_score(single, 0, toy_index))


class TestSearch:
    def test_no_known_terms_empty(self, toy_index):
        assert search(Query(query_id="q", term_ids=(99,)), toy_index) == []

    def test_only_sharing_subprofiles_scored(self, toy_index):
        hits = search(Query(query_id="q", term_ids=(0,)), toy_index)
        assert [h.candidate_id for h in hits] == ["a"]

    def test_matches_bruteforce_scoring(self):
        rng = np.random.default_rng(4)
        subprofiles = [
            sp(f"c{i}", t, {int(tid): int(c) for tid, c in
                            zip(rng.integers(0, 30, 5), rng.integers(1, 9, 5))})
            for i in range(20) for t in range(3)
        ]
        index = build_index(subprofiles)
        q = Query(query_id="q", term_ids=tuple(int(t) for t in rng.integers(0, 30, 4)))
        hits = search(q, index, top_n=1000)
        expected = []
        for i, s in enumerate(index.subprofiles):
            if any(t in s.term_counts for t in q.term_ids):
                expected.append((-lm_score(q, i, index), s.key))
        expected.sort()
        assert [h.score for h in hits] == pytest.approx([-neg for neg, _ in expected])
        assert [h.rank for h in hits] == list(range(1, len(expected) + 1))

    def test_top_n_truncates(self, toy_index):
        hits = search(Query(query_id="q", term_ids=(1,)), toy_index, top_n=1)
        assert len(hits) == 1

    def test_invalid_top_n(self, toy_index):
        with pytest.raises(ValueError):
            search(Query(query_id="q", term_ids=(0,)), toy_index, top_n=0)


class TestCosineTopicSearch:
    def test_identical_vector_scores_one(self):
        p = TopicProfile(candidate_id="a", source_id="d1", topic_vector=np.array([0.7, 0.3]))
        hits = cosine_topic_search(np.array([0.7, 0.3]), [p])
        assert hits[0].score == pytest.approx(1.0)

    def test_orthogonal_scores_zero(self):
        p = TopicProfile(candidate_id="a", source_id="d1", topic_vector=np.array([0.0, 1.0]))
        hits = cosine_topic_search(np.array([1.0, 0.0]), [p])
        assert hits[0].score == pytest.approx(0.0)

    def test_three_profile_ordering(self):
        profiles = [
            TopicProfile(candidate_id="a", source_id="d1", topic_vector=np.array([1.0, 0.0])),
            TopicProfile(candidate_id="b", source_id="d2", topic_vector=np.array([0.5, 0.5])),
            TopicProfile(candidate_id="c", source_id="d3", topic_vector=np.array([0.0, 1.0])),
        ]
        hits = cosine_topic_search(np.array([0.9, 0.1]), profiles)
        assert [h.candidate_id for h in hits] == ["a", "b", "c"]

    def test_zero_query_vector(self):
        p = TopicProfile(candidate_id="a", source_id="d1", topic_vector=np.array([1.0]))
        with pytest.raises(ZeroVector):
            cosine_topic_search(np.array([0.0]), [p])


class TestRunLines:
    def test_format(self, toy_index):
        hits = search(Query(query_id="q7", term_ids=(1,)), toy_index)
        buf = io.StringIO()
        write_run_lines("q7", hits, "mytag", buf)
        lines = buf.getvalue().splitlines()
        assert len(lines) == 2
        fields = lines[0].split()
        assert fields[0] == "q7" and fields[1] == "Q0" and fields[-1] == "mytag"
        assert fields[3] == "1"
