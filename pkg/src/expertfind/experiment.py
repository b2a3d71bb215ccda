"""End-to-end experiment runner: repeated splits, LDA training, profile
construction for all requested systems, retrieval, fusion and metric
aggregation into a report."""

from __future__ import annotations

import configparser
import json
import os
from dataclasses import dataclass, field
from typing import Optional

from . import fusion, lda, profiles, retrieval
from .corpus import (
    Corpus,
    CorpusPartition,
    Document,
    PreprocessConfig,
    RawIntervention,
    STEMMERS,
    build_corpus,
    make_partitions,
)
from .errors import EmptyQuery, MalformedConfig
from .evaluation import (
    Qrel,
    make_qrels,
    make_query,
    ndcg_at,
    paired_t_test,
    precision_at,
    recall_at_nr,
)
from .topicselect import Strategy

STRATEGY_SYSTEMS = {
    "lda_euclidean": Strategy.EUCLIDEAN,
    "lda_dice": Strategy.DICE,
    "lda_sorensen": Strategy.SORENSEN,
    "lda_cosine": Strategy.COSINE,
    "lda_overlap": Strategy.OVERLAP,
}
BASELINE_SYSTEMS = ("term_mon", "term_int", "topic_mon", "topic_int")


@dataclass
class RunConfig:
    corpus_path: str
    truth_path: str
    workdir: str
    stopword_file: str = ""
    stemmer: str = "identity"
    min_df_fraction: float = 0.01
    k_heuristic: str = "sqrt_half_n"
    k_fixed: int = 0
    alpha: Optional[float] = None  # defaults to 50/k
    beta: float = 0.1
    iterations: int = 1000
    seed: int = 0
    strategies: tuple[str, ...] = tuple(STRATEGY_SYSTEMS)
    baselines: tuple[str, ...] = ()
    mu: float = retrieval.DEFAULT_MU
    depth: int = fusion.DEFAULT_DEPTH
    n_splits: int = 5
    ratio: float = 0.8
    cutoff: int = 10
    min_interventions: int = 10

    @classmethod
    def from_file(cls, path: str) -> "RunConfig":
        parser = configparser.ConfigParser()
        if not parser.read(path):
            raise MalformedConfig(f"cannot read config {path!r}")

        def get(section, key, fallback=None):
            return parser.get(section, key, fallback=fallback)

        try:
            cfg = cls(
                corpus_path=parser.get("paths", "corpus"),
                truth_path=parser.get("paths", "truth"),
                workdir=parser.get("paths", "workdir"),
            )
        except (configparser.NoSectionError, configparser.NoOptionError) as exc:
            raise MalformedConfig(str(exc)) from exc

        cfg.stopword_file = get("preprocess", "stopword_file", cfg.stopword_file)
        cfg.stemmer = get("preprocess", "stemmer", cfg.stemmer)
        cfg.min_df_fraction = float(
            get("preprocess", "min_df_fraction", str(cfg.min_df_fraction))
        )
        cfg.k_heuristic = get("lda", "k_heuristic", cfg.k_heuristic)
        cfg.k_fixed = int(get("lda", "k_fixed", str(cfg.k_fixed)))
        alpha = get("lda", "alpha", "")
        cfg.alpha = float(alpha) if alpha else None
        cfg.beta = float(get("lda", "beta", str(cfg.beta)))
        cfg.iterations = int(get("lda", "iterations", str(cfg.iterations)))
        cfg.seed = int(get("lda", "seed", str(cfg.seed)))
        strategies = get("systems", "strategies", ",".join(cfg.strategies))
        cfg.strategies = tuple(s.strip() for s in strategies.split(",") if s.strip())
        baselines = get("systems", "baselines", ",".join(cfg.baselines))
        cfg.baselines = tuple(s.strip() for s in baselines.split(",") if s.strip())
        cfg.mu = float(get("retrieval", "mu", str(cfg.mu)))
        cfg.depth = int(get("retrieval", "depth", str(cfg.depth)))
        cfg.n_splits = int(get("eval", "splits", str(cfg.n_splits)))
        cfg.ratio = float(get("eval", "ratio", str(cfg.ratio)))
        cfg.cutoff = int(get("eval", "cutoff", str(cfg.cutoff)))
        cfg.min_interventions = int(
            get("eval", "min_interventions", str(cfg.min_interventions))
        )
        cfg.validate()
        return cfg

    def validate(self) -> None:
        for name in self.strategies:
            if name not in STRATEGY_SYSTEMS:
                raise MalformedConfig(f"unknown strategy system {name!r}")
        for name in self.baselines:
            if name not in BASELINE_SYSTEMS:
                raise MalformedConfig(f"unknown baseline {name!r}")
        if not self.strategies and not self.baselines:
            raise MalformedConfig("at least one system must be requested")
        if self.stemmer not in STEMMERS:
            raise MalformedConfig(f"unknown stemmer {self.stemmer!r}")

    def preprocess_config(self) -> PreprocessConfig:
        stopwords: frozenset[str] = frozenset()
        if self.stopword_file:
            with open(self.stopword_file, encoding="utf-8") as fh:
                stopwords = frozenset(w.strip() for w in fh if w.strip())
        return PreprocessConfig(
            stopwords=stopwords,
            stemmer=STEMMERS[self.stemmer],
            min_df_fraction=self.min_df_fraction,
        )


@dataclass
class MetricReport:
    # system -> metric name -> mean over queries then splits
    means: dict[str, dict[str, float]]
    k_values: list[int]
    # system -> split index -> query id -> (ndcg, p, recall)
    raw: dict[str, list[dict[str, tuple[float, float, float]]]]

    def to_text(self) -> str:
        lines = [
            f"{'system':<16}{'k':>8}{'ndcg@10':>10}{'p@10':>10}{'recall@nr':>12}"
        ]
        k_str = "/".join(str(k) for k in sorted(set(self.k_values)))
        for system in sorted(self.means):
            m = self.means[system]
            lines.append(
                f"{system:<16}{k_str:>8}{m['ndcg']:>10.4f}"
                f"{m['p']:>10.4f}{m['recall']:>12.4f}"
            )
        return "\n".join(lines) + "\n"

    def to_jsonl(self) -> str:
        out = []
        k_values = sorted(set(self.k_values))
        for system in sorted(self.means):
            m = self.means[system]
            out.append(
                json.dumps(
                    {
                        "system": system,
                        "k": k_values,
                        "ndcg@10": round(m["ndcg"], 6),
                        "p@10": round(m["p"], 6),
                        "recall@nr": round(m["recall"], 6),
                    },
                    sort_keys=True,
                )
            )
        return "\n".join(out) + "\n"

    def per_query_values(self, system: str, metric_index: int) -> list[float]:
        """Pooled per-query values across splits, in deterministic order."""
        values = []
        for split_values in self.raw[system]:
            for query_id in sorted(split_values):
                values.append(split_values[query_id][metric_index])
        return values

    def pairwise_pvalue(self, system_a: str, system_b: str, metric_index: int = 0) -> float:
        return paired_t_test(
            self.per_query_values(system_a, metric_index),
            self.per_query_values(system_b, metric_index),
        )


def _choose_k(cfg: RunConfig, train_corpus: Corpus) -> int:
    if cfg.k_heuristic == "fixed":
        heuristic = lda.KHeuristic("fixed", cfg.k_fixed)
    else:
        heuristic = lda.KHeuristic(cfg.k_heuristic)
    return lda.choose_k(
        m=train_corpus.n_terms,
        n=train_corpus.n_documents,
        t_nnz=max(train_corpus.nnz(), 1),
        heuristic=heuristic,
    )


def _unique_initiative_records(
    records: list[RawIntervention], initiative_ids
) -> list[RawIntervention]:
    wanted = set(initiative_ids)
    seen: set[str] = set()
    out = []
    for rec in records:
        if rec.initiative_id in wanted and rec.initiative_id not in seen:
            seen.add(rec.initiative_id)
            out.append(rec)
    return out


def _query_as_document(query: retrieval.Query) -> Document:
    counts: dict[int, int] = {}
    for tid in query.term_ids:
        counts[tid] = counts.get(tid, 0) + 1
    return Document(
        doc_id=f"query::{query.query_id}",
        initiative_id=query.query_id,
        candidate_id="",
        term_counts=counts,
    )


def _term_system_ranking(query, index, cfg: RunConfig) -> fusion.CandidateRanking:
    hits = retrieval.search(query, index, mu=cfg.mu, top_n=cfg.depth)
    return fusion.comb_lg_dcs(hits, depth=cfg.depth)


def run_split(
    cfg: RunConfig,
    corpus: Corpus,
    records: list[RawIntervention],
    memberships: dict[str, set[str]],
    partition: CorpusPartition,
    split_idx: int,
    preprocess: PreprocessConfig,
):
    """Train, build every requested system, run all queries for one
    split. Returns (k, {system: {query_id: (ndcg, p, recall)}})."""
    train_corpus = corpus.restrict(partition.train)
    k = _choose_k(cfg, train_corpus)
    seed = cfg.seed + split_idx

    systems: dict[str, object] = {}
    model = None
    if cfg.strategies:
        model = lda.train(
            train_corpus,
            k=k,
            alpha=cfg.alpha,
            beta=cfg.beta,
            iterations=cfg.iterations,
            seed=seed,
        )
        for name in cfg.strategies:
            subprofiles, _ = profiles.build_lda_subprofiles(
                train_corpus, model, STRATEGY_SYSTEMS[name]
            )
            systems[name] = retrieval.build_index(subprofiles)

    topic_models: dict[str, lda.TopicModel] = {}
    for name in cfg.baselines:
        if name == "term_mon":
            systems[name] = retrieval.build_index(
                profiles.build_term_monolithic(train_corpus)
            )
        elif name == "term_int":
            systems[name] = retrieval.build_index(
                profiles.build_term_intervention(train_corpus)
            )
        else:
            mode = "monolithic" if name == "topic_mon" else "intervention"
            topic_profiles, topic_model = profiles.build_topic_profiles(
                train_corpus,
                k=k,
                mode=mode,
                alpha=cfg.alpha,
                beta=cfg.beta,
                iterations=cfg.iterations,
                seed=seed,
            )
            systems[name] = topic_profiles
            topic_models[name] = topic_model

    test_records = _unique_initiative_records(records, partition.test)
    qrels = make_qrels(
        test_records, memberships, train_corpus, cfg.min_interventions
    )
    qrel_by_id = {q.query_id: q for q in qrels}

    results: dict[str, dict[str, tuple[float, float, float]]] = {
        name: {} for name in systems
    }
    for rec in test_records:
        qrel = qrel_by_id.get(rec.initiative_id)
        if qrel is None:
            continue
        try:
            query = make_query(rec, preprocess, corpus.vocabulary)
        except EmptyQuery:
            continue
        for name, system in systems.items():
            if isinstance(system, retrieval.Index):
                ranking = _term_system_ranking(query, system, cfg)
            else:
                q_vec = lda.fold_in(
                    topic_models[name], _query_as_document(query), seed=seed
                )
                hits = retrieval.cosine_topic_search(q_vec, system, top_n=cfg.depth)
                ranking = fusion.comb_lg_dcs(hits, depth=cfg.depth)
            results[name][rec.initiative_id] = (
                ndcg_at(ranking, qrel, cfg.cutoff),
                precision_at(ranking, qrel, cfg.cutoff),
                recall_at_nr(ranking, qrel),
            )
    return k, results


def run_experiment(
    cfg: RunConfig,
    records: Optional[list[RawIntervention]] = None,
    memberships: Optional[dict[str, set[str]]] = None,
) -> MetricReport:
    """Full protocol: build corpus, partition n_splits times, run every
    system on every split, average per-query metrics over queries and
    then over splits."""
    from .corpus import read_interventions
    from .synth import load_memberships

    if records is None:
        records = read_interventions(cfg.corpus_path)
    if memberships is None:
        memberships = load_memberships(cfg.truth_path)
    preprocess = cfg.preprocess_config()
    corpus, _ = build_corpus(records, preprocess)
    partitions = make_partitions(corpus, cfg.ratio, cfg.n_splits, cfg.seed)

    all_systems = list(cfg.strategies) + list(cfg.baselines)
    raw: dict[str, list[dict[str, tuple[float, float, float]]]] = {
        name: [] for name in all_systems
    }
    k_values = []
    for split_idx, partition in enumerate(partitions):
        k, results = run_split(
            cfg, corpus, records, memberships, partition, split_idx, preprocess
        )
        k_values.append(k)
        for name in all_systems:
            raw[name].append(results[name])

    means: dict[str, dict[str, float]] = {}
    for name in all_systems:
        split_means = {"ndcg": [], "p": [], "recall": []}
        for split_values in raw[name]:
            if not split_values:
                continue
            values = list(split_values.values())
            split_means["ndcg"].append(sum(v[0] for v in values) / len(values))
            split_means["p"].append(sum(v[1] for v in values) / len(values))
            split_means["recall"].append(sum(v[2] for v in values) / len(values))
        means[name] = {
            metric: (sum(vals) / len(vals) if vals else 0.0)
            for metric, vals in split_means.items()
        }
    return MetricReport(means=means, k_values=k_values, raw=raw)


def write_report(report: MetricReport, workdir: str) -> tuple[str, str]:
    os.makedirs(workdir, exist_ok=True)
    text_path = os.path.join(workdir, "report.txt")
    jsonl_path = os.path.join(workdir, "report.jsonl")
    with open(text_path, "w", encoding="utf-8") as fh:
        fh.write(report.to_text())
    with open(jsonl_path, "w", encoding="utf-8") as fh:
        fh.write(report.to_jsonl())
    return text_path, jsonl_path
