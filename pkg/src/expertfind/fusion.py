"""CombLgDCS: fuse a ranking of (candidate, topic) subprofile hits into
a ranking of candidates with logarithmic rank discounting."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .retrieval import ScoredHit

SHIFT_EPSILON = 1e-6
DEFAULT_DEPTH = 1000


@dataclass
class CandidateRanking:
    ranking: list[tuple[str, float]]  # (candidate_id, fused score), descending
    provenance: dict[str, list[ScoredHit]] = field(default_factory=dict)

    def candidates(self) -> list[str]:
        return [cand for cand, _ in self.ranking]


def _shift_positive(hits: list[ScoredHit]) -> list[ScoredHit]:
    """CombLgDCS presumes positive scores; LM log-likelihoods are
    negative, so shift per query when needed (order preserving)."""
    lowest = min(h.score for h in hits)
    if lowest > 0.0:
        return hits
    return [
        ScoredHit(
            candidate_id=h.candidate_id,
            topic_id=h.topic_id,
            score=h.score - lowest + SHIFT_EPSILON,
            rank=h.rank,
        )
        for h in hits
    ]


def comb_lg_dcs(hits: list[ScoredHit], depth: int = DEFAULT_DEPTH) -> CandidateRanking:
    """score(candidate) = sum of hit score / log2(rank + 1), where a
    candidate's first-ranked subprofile takes rank 1 and later hits keep
    their raw position. Ties break by candidate id ascending."""
    hits = [h for h in hits if h.rank <= depth]
    if not hits:
        return CandidateRanking(ranking=[])
    hits = sorted(hits, key=lambda h: h.rank)
    hits = _shift_positive(hits)

    fused: dict[str, float] = {}
    provenance: dict[str, list[ScoredHit]] = {}
    for hit in hits:
        first = hit.candidate_id not in fused
        rank = 1 if first else hit.rank
        fused.setdefault(hit.candidate_id, 0.0)
        fused[hit.candidate_id] += hit.score / math.log2(rank + 1)
        provenance.setdefault(hit.candidate_id, []).append(hit)

    ordered = sorted(fused.items(), key=lambda item: (-item[1], item[0]))
    return CandidateRanking(ranking=ordered, provenance=provenance)


def write_candidate_run(query_id: str, ranking: CandidateRanking, run_tag: str, fh) -> None:
    for pos, (cand, score) in enumerate(ranking.ranking, start=1):
        fh.write(f"{query_id} Q0 {cand} {pos} {score:.6f} {run_tag}\n")
