"""Command-line orchestration of the pipeline: ingest, synth, train,
split-docs, profile, index, search, fuse, evaluate, stats, measures."""

from __future__ import annotations

import argparse
import contextlib
import os
import sys

import numpy as np

from . import corpus as corpus_mod
from . import errors, fusion, lda, profiles, retrieval, synth
from .evaluation import make_query
from .experiment import (
    STRATEGY_SYSTEMS,
    RunConfig,
    run_experiment,
    write_report,
)
from .topicselect import (
    MEASURE_TO_STRATEGY,
    Measure,
    SortedTopicDist,
    Strategy,
    brute_force_select,
    measure_score,
    select_count,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_MISSING = 3
EXIT_MODULE = 4


@contextlib.contextmanager
def _workdir_lock(workdir: str):
    os.makedirs(workdir, exist_ok=True)
    lock = os.path.join(workdir, ".lock")
    if os.path.exists(lock):
        raise errors.MalformedConfig(
            f"workdir {workdir!r} is locked by another invocation"
        )
    with open(lock, "w") as fh:
        fh.write(str(os.getpid()))
    try:
        yield
    finally:
        with contextlib.suppress(FileNotFoundError):
            os.remove(lock)


def _require(path: str, what: str) -> str:
    if not os.path.exists(path):
        raise errors.MissingArtifact(f"{what} not found: {path}")
    return path


def _workdir(args) -> str:
    return os.environ.get("EXPERTFIND_WORKDIR", args.workdir)


def _seed(args) -> int:
    return int(os.environ.get("EXPERTFIND_SEED", args.seed))


def _load_workdir_corpus(workdir: str) -> corpus_mod.Corpus:
    return corpus_mod.load_corpus(_require(os.path.join(workdir, "corpus.json"), "corpus"))


def _load_workdir_model(workdir: str) -> lda.TopicModel:
    return lda.load_model(_require(os.path.join(workdir, "model.txt"), "model"))


def cmd_ingest(args) -> int:
    workdir = _workdir(args)
    records = corpus_mod.read_interventions(_require(args.records, "records file"))
    config = (
        corpus_mod.PreprocessConfig.from_file(_require(args.preprocess, "preprocess config"))
        if args.preprocess
        else corpus_mod.PreprocessConfig()
    )
    with _workdir_lock(workdir):
        corpus, _ = corpus_mod.build_corpus(records, config)
        corpus_mod.save_corpus(corpus, os.path.join(workdir, "corpus.json"))
        corpus_mod.write_skip_log(corpus, os.path.join(workdir, "skip_log.txt"))
    print(
        f"ingested {corpus.n_documents} documents, {corpus.n_terms} terms, "
        f"{len(corpus.skipped_doc_ids)} skipped"
    )
    return EXIT_OK


def cmd_synth(args) -> int:
    spec = synth.SynthSpec(seed=_seed(args))
    records, truth = synth.generate(spec)
    corpus_mod.write_interventions(records, args.out)
    synth.save_truth(truth, args.truth)
    print(f"wrote {len(records)} interventions to {args.out}")
    return EXIT_OK


def cmd_train(args) -> int:
    workdir = _workdir(args)
    corpus = _load_workdir_corpus(workdir)
    if args.partition_file:
        partitions = corpus_mod.load_partitions(_require(args.partition_file, "partitions"))
        corpus = corpus.restrict(partitions[args.split].train)
    if args.k:
        k = args.k
    else:
        heuristic = lda.KHeuristic(args.k_heuristic)
        k = lda.choose_k(
            m=corpus.n_terms,
            n=corpus.n_documents,
            t_nnz=max(corpus.nnz(), 1),
            heuristic=heuristic,
        )
    with _workdir_lock(workdir):
        model = lda.train(
            corpus,
            k=k,
            alpha=args.alpha,
            beta=args.beta,
            iterations=args.iterations,
            seed=_seed(args),
        )
        lda.save_model(model, os.path.join(workdir, "model.txt"))
    print(f"trained k={k} on {corpus.n_documents} documents")
    return EXIT_OK


def cmd_split_docs(args) -> int:
    workdir = _workdir(args)
    corpus = _load_workdir_corpus(workdir)
    model = _load_workdir_model(workdir)
    strategy = Strategy(args.strategy)
    from .splitter import split_document, write_subdocument_dump

    subdocs = []
    for doc in corpus.documents:
        if doc.doc_id in set(model.doc_ids):
            subdocs.extend(split_document(model, doc, strategy))
    out = os.path.join(workdir, f"subdocs_{args.strategy}.tsv")
    write_subdocument_dump(subdocs, corpus.vocabulary, out)
    print(f"wrote {len(subdocs)} subdocuments to {out}")
    return EXIT_OK


def _build_system_profiles(system: str, corpus, model):
    if system in STRATEGY_SYSTEMS:
        if model is None:
            raise errors.MissingArtifact("LDA systems require a trained model")
        return profiles.build_lda_subprofiles(corpus, model, STRATEGY_SYSTEMS[system])
    if system == "term_mon":
        return profiles.build_term_monolithic(corpus), None
    if system == "term_int":
        return profiles.build_term_intervention(corpus), None
    raise errors.MalformedConfig(f"unknown profile system {system!r}")


def cmd_profile(args) -> int:
    workdir = _workdir(args)
    corpus = _load_workdir_corpus(workdir)
    model = None
    if args.system in STRATEGY_SYSTEMS:
        model = _load_workdir_model(workdir)
        corpus = corpus_mod.Corpus(
            documents=[d for d in corpus.documents if d.doc_id in set(model.doc_ids)],
            vocabulary=corpus.vocabulary,
        )
    subprofiles, _ = _build_system_profiles(args.system, corpus, model)
    path = profiles.save_subprofiles(
        subprofiles, corpus.vocabulary, os.path.join(workdir, "profiles"), args.system
    )
    print(f"wrote {len(subprofiles)} subprofiles to {path}")
    return EXIT_OK


def cmd_index(args) -> int:
    workdir = _workdir(args)
    corpus = _load_workdir_corpus(workdir)
    path = _require(
        os.path.join(workdir, "profiles", f"{args.system}.tsv"), "profile store"
    )
    subprofiles = profiles.load_subprofiles(path, corpus.vocabulary)
    index = retrieval.build_index(subprofiles)
    print(
        f"indexed {len(index.subprofiles)} subprofiles, "
        f"collection length {index.collection_length}"
    )
    return EXIT_OK


def cmd_search(args) -> int:
    workdir = _workdir(args)
    corpus = _load_workdir_corpus(workdir)
    path = _require(
        os.path.join(workdir, "profiles", f"{args.system}.tsv"), "profile store"
    )
    subprofiles = profiles.load_subprofiles(path, corpus.vocabulary)
    index = retrieval.build_index(subprofiles)
    rec = corpus_mod.RawIntervention(
        initiative_id=args.query_id,
        candidate_id="query",
        committee_id=None,
        title=args.query,
        subjects=(),
        body="",
    )
    query = make_query(rec, corpus_mod.PreprocessConfig(), corpus.vocabulary)
    hits = retrieval.search(query, index, mu=args.mu, top_n=args.top)
    retrieval.write_run_lines(args.query_id, hits, args.system, sys.stdout)
    return EXIT_OK


def cmd_fuse(args) -> int:
    hits = []
    with open(_require(args.run, "run file"), encoding="utf-8") as fh:
        query_id = None
        for line in fh:
            if not line.strip():
                continue
            qid, _, target, rank, score, _ = line.split()
            if query_id is None:
                query_id = qid
            elif qid != query_id:
                raise errors.MalformedConfig("fuse expects a single-query run file")
            cand, _, topic = target.rpartition("::")
            hits.append(
                retrieval.ScoredHit(
                    candidate_id=cand or target,
                    topic_id=topic,
                    score=float(score),
                    rank=int(rank),
                )
            )
    ranking = fusion.comb_lg_dcs(hits, depth=args.depth)
    fusion.write_candidate_run(query_id or "q", ranking, "comblgdcs", sys.stdout)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    cfg = RunConfig.from_file(_require(args.config, "run config"))
    with _workdir_lock(cfg.workdir):
        report = run_experiment(cfg)
        text_path, jsonl_path = write_report(report, cfg.workdir)
    sys.stdout.write(report.to_text())
    print(f"report written to {text_path} and {jsonl_path}")
    return EXIT_OK


def cmd_stats(args) -> int:
    workdir = _workdir(args)
    corpus = _load_workdir_corpus(workdir)
    model = _load_workdir_model(workdir) if args.systems_need_model else None
    rows = {}
    doc_candidates = {d.doc_id: d.candidate_id for d in corpus.documents}
    for system in args.systems.split(","):
        system = system.strip()
        if system in STRATEGY_SYSTEMS:
            model = model or _load_workdir_model(workdir)
            train_corpus = corpus_mod.Corpus(
                documents=[
                    d for d in corpus.documents if d.doc_id in set(model.doc_ids)
                ],
                vocabulary=corpus.vocabulary,
            )
            subprofiles, splits = profiles.build_lda_subprofiles(
                train_corpus, model, STRATEGY_SYSTEMS[system]
            )
            rows[system] = profiles.profile_stats(subprofiles, splits, doc_candidates)
        else:
            subprofiles, _ = _build_system_profiles(system, corpus, None)
            rows[system] = profiles.profile_stats(subprofiles)
    sys.stdout.write(profiles.format_stats_table(rows))
    return EXIT_OK


def cmd_measures(args) -> int:
    probs = np.array([float(v) for v in args.dist.split(",")])
    dist = SortedTopicDist.from_distribution(probs)
    print(f"{'measure':<16}{'selected':>10}{'score':>14}   strategy")
    for measure in Measure:
        j = brute_force_select(dist, measure)
        score = measure_score(dist, j, measure)
        print(
            f"{measure.value:<16}{j:>10}{score:>14.6f}   "
            f"{MEASURE_TO_STRATEGY[measure].value}"
        )
    print()
    print(f"{'strategy':<16}{'selected':>10}")
    for strategy in Strategy:
        print(f"{strategy.value:<16}{select_count(dist, strategy):>10}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="expertfind",
        description="Topic-based subprofile construction and expert retrieval",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="build corpus artifacts from raw records")
    p.add_argument("--records", required=True)
    p.add_argument("--preprocess", default="")
    p.add_argument("--workdir", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("synth", help="generate a synthetic planted corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="train the LDA topic model")
    p.add_argument("--workdir", required=True)
    p.add_argument("--partition-file", default="")
    p.add_argument("--split", type=int, default=0)
    p.add_argument("--k", type=int, default=0)
    p.add_argument(
        "--k-heuristic",
        default="sqrt_half_n",
        choices=["terms_docs_over_nnz", "sqrt_half_n"],
    )
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=0.1)
    p.add_argument("--iterations", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("split-docs", help="dump per-topic subdocuments")
    p.add_argument("--workdir", required=True)
    p.add_argument("--strategy", required=True, choices=[s.value for s in Strategy])
    p.set_defaults(func=cmd_split_docs)

    p = sub.add_parser("profile", help="build and store subprofiles")
    p.add_argument("--workdir", required=True)
    p.add_argument("--system", required=True)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("index", help="build the retrieval index for a profile store")
    p.add_argument("--workdir", required=True)
    p.add_argument("--system", required=True)
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("search", help="run a free-text query against a profile store")
    p.add_argument("--workdir", required=True)
    p.add_argument("--system", required=True)
    p.add_argument("--query", required=True)
    p.add_argument("--query-id", default="q1")
    p.add_argument("--mu", type=float, default=retrieval.DEFAULT_MU)
    p.add_argument("--top", type=int, default=1000)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("fuse", help="fuse a subprofile run into a candidate ranking")
    p.add_argument("--run", required=True)
    p.add_argument("--depth", type=int, default=fusion.DEFAULT_DEPTH)
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("evaluate", help="run the full evaluation protocol")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("stats", help="profile-size statistics table")
    p.add_argument("--workdir", required=True)
    p.add_argument("--systems", required=True)
    p.add_argument("--systems-need-model", action="store_true")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("measures", help="per-measure selection diagnostics")
    p.add_argument("--dist", required=True, help="comma-separated probabilities")
    p.set_defaults(func=cmd_measures)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except errors.MalformedConfig as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except errors.MissingArtifact as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except errors.ExpertFindError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MODULE


if __name__ == "__main__":
    sys.exit(main())
