"""Expert finding with LDA topic-based term subprofiles."""

from .corpus import (
    Corpus,
    CorpusPartition,
    Document,
    PreprocessConfig,
    RawIntervention,
    Vocabulary,
    build_corpus,
    make_partitions,
    normalize,
)
from .lda import KHeuristic, TopicModel, choose_k, fold_in, train
from .topicselect import (
    Measure,
    SortedTopicDist,
    Strategy,
    brute_force_select,
    measure_score,
    select_count,
)
from .splitter import (
    Subdocument,
    distribute_frequency,
    renormalized_posterior,
    split_document,
    topic_posterior,
)
from .profiles import (
    ProfileStats,
    Subprofile,
    TopicProfile,
    build_lda_subprofiles,
    build_term_intervention,
    build_term_monolithic,
    build_topic_profiles,
    profile_stats,
)
from .retrieval import Index, Query, ScoredHit, build_index, cosine_topic_search, lm_score, search
from .fusion import CandidateRanking, comb_lg_dcs
from .evaluation import (
    Qrel,
    entropy_scatter,
    make_qrels,
    make_query,
    ndcg_at,
    normalized_entropy,
    paired_t_test,
    precision_at,
    recall_at_nr,
)
from .synth import SynthSpec, SynthTruth, generate
from .experiment import MetricReport, RunConfig, run_experiment

__version__ = "0.1.0"
