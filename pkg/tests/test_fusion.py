"""CombLgDCS fusion of subprofile hits into candidate rankings."""

import io
import math

import pytest

from expertfind.fusion import CandidateRanking, comb_lg_dcs, write_candidate_run
from expertfind.retrieval import ScoredHit


def hit(cand, score, rank, topic=0):
    return ScoredHit(candidate_id=cand, topic_id=topic, score=score, rank=rank)


class TestCombLgDcs:
    def test_single_hit_keeps_raw_score(self):
        ranking = comb_lg_dcs([hit("A", 3.0, 5)])
        assert ranking.ranking == [("A", pytest.approx(3.0))]

    def test_second_hit_discounted_by_raw_position(self):
        ranking = comb_lg_dcs([hit("A", 2.0, 1), hit("A", 1.0, 3, topic=1)])
        assert ranking.ranking == [("A", pytest.approx(2.5))]

    def test_each_candidates_first_hit_takes_rank_one(self):
        ranking = comb_lg_dcs([hit("A", 2.0, 1), hit("B", 1.9, 2)])
        assert ranking.ranking == [
            ("A", pytest.approx(2.0)),
            ("B", pytest.approx(1.9)),
        ]

    def test_empty_input(self):
        assert comb_lg_dcs([]).ranking == []

    def test_extra_positive_hit_never_decreases_score(self):
        base = comb_lg_dcs([hit("A", 2.0, 1), hit("B", 1.5, 2)])
        more = comb_lg_dcs(
            [hit("A", 2.0, 1), hit("B", 1.5, 2), hit("A", 1.0, 3, topic=1)]
        )
        assert dict(more.ranking)["A"] >= dict(base.ranking)["A"]

    def test_negative_scores_shifted_order_preserved(self):
        # log-likelihood inputs are negative; fusion must still rank the
        # better-scoring hit first
        ranking = comb_lg_dcs([hit("A", -1.0, 1), hit("B", -2.0, 2)])
        assert ranking.candidates() == ["A", "B"]
        assert all(score > 0 for _, score in ranking.ranking)

    def test_depth_cutoff(self):
        ranking = comb_lg_dcs([hit("A", 2.0, 1), hit("B", 1.0, 50)], depth=10)
        assert ranking.candidates() == ["A"]

    def test_tie_breaks_by_candidate_id(self):
        ranking = comb_lg_dcs([hit("B", 1.0, 1), hit("A", 1.0, 2)])
        assert ranking.candidates() == ["A", "B"]

    def test_input_order_irrelevant(self):
        hits = [hit("A", 2.0, 1), hit("B", 1.9, 2), hit("A", 1.0, 3, topic=1)]
        assert comb_lg_dcs(hits).ranking == comb_lg_dcs(hits[::-1]).ranking

    def test_provenance_collects_hits(self):
        hits = [hit("A", 2.0, 1), hit("A", 1.0, 3, topic=1)]
        ranking = comb_lg_dcs(hits)
        assert len(ranking.provenance["A"]) == 2


class TestCandidateRun:
    def test_format(self):
        ranking = CandidateRanking(ranking=[("A", 2.0), ("B", 1.0)])
        buf = io.StringIO()
        write_candidate_run("q1", ranking, "fused", buf)
        lines = buf.getvalue().splitlines()
        assert lines[0].split() == ["q1", "Q0", "A", "1", "2.000000", "fused"]
        assert lines[1].split()[2:4] == ["B", "2"]
