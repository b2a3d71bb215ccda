"""LDA by collapsed Gibbs sampling: training, k heuristics, fold-in for
unseen documents, and lossless model persistence."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numba import njit

from .corpus import Corpus, Document
from .errors import EmptyCorpus, InvalidK, NoKnownTerms


@dataclass(frozen=True)
class KHeuristic:
    """How to pick the number of topics from corpus statistics."""

    kind: str  # terms_docs_over_nnz | sqrt_half_n | fixed
    value: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("terms_docs_over_nnz", "sqrt_half_n", "fixed"):
            raise ValueError(f"unknown heuristic {self.kind!r}")
        if self.kind == "fixed" and (self.value is None or self.value < 2):
            raise ValueError("fixed heuristic requires value >= 2")


def choose_k(m: int, n: int, t_nnz: int, heuristic: KHeuristic) -> int:
    """Pick the topic count. Truncation (not rounding) reproduces the
    reference values 24 and 70 for the classic heuristics."""
    if m < 1 or n < 1 or t_nnz < 1:
        raise ValueError("corpus statistics must be >= 1")
    if heuristic.kind == "terms_docs_over_nnz":
        k = int(m * n / t_nnz)
    elif heuristic.kind == "sqrt_half_n":
        k = int(math.sqrt(n / 2.0))
    else:
        k = int(heuristic.value)
    return max(k, 2)


@dataclass
class TopicModel:
    """phi[x, t] = p(t | topic x), rows sum to 1 (k x m).
    theta[d, x] = p(topic x | doc d), rows sum to 1 (n x k).
    doc_ids orders the theta rows."""

    k: int
    phi: np.ndarray
    theta: np.ndarray
    doc_ids: list[str]
    alpha: float
    beta: float
    seed: int
    iterations: int

    @property
    def n_terms(self) -> int:
        return self.phi.shape[1]

    @property
    def n_documents(self) -> int:
        return self.theta.shape[0]

    def theta_of(self, doc_id: str) -> np.ndarray:
        return self.theta[self._row_index()[doc_id]]

    def _row_index(self) -> dict[str, int]:
        cached = getattr(self, "_row_index_cache", None)
        if cached is None:
            cached = {doc_id: i for i, doc_id in enumerate(self.doc_ids)}
            object.__setattr__(self, "_row_index_cache", cached)
        return cached


@njit(cache=True)
def _gibbs_sweeps(
    tokens, doc_of, z, n_dk, n_kt, n_k, doc_len, alpha, beta, n_sweeps, check_counts
):
    n_topics = n_kt.shape[0]
    n_terms = n_kt.shape[1]
    prob = np.empty(n_topics)
    for _ in range(n_sweeps):
        for i in range(tokens.shape[0]):
            t = tokens[i]
            d = doc_of[i]
            old = z[i]
            n_dk[d, old] -= 1
            n_kt[old, t] -= 1
            n_k[old] -= 1

            total = 0.0
            for x in range(n_topics):
                p = (
                    (n_kt[x, t] + beta)
                    / (n_k[x] + n_terms * beta)
                    * (n_dk[d, x] + alpha)
                )
                total += p
                prob[x] = total
            u = np.random.random() * total
            new = 0
            while new < n_topics - 1 and prob[new] < u:
                new += 1

            z[i] = new
            n_dk[d, new] += 1
            n_kt[new, t] += 1
            n_k[new] += 1
        if check_counts:
            for d in range(n_dk.shape[0]):
                s = 0
                for x in range(n_topics):
                    s += n_dk[d, x]
                if s != doc_len[d]:
                    raise AssertionError("topic-document counts out of sync")
    return 0


@njit(cache=True)
def _seed_numba(seed):
    np.random.seed(seed)


def _flatten(corpus: Corpus) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Expand documents into token instances, document-major,
    position-major (term id ascending within a document)."""
    tokens = []
    doc_of = []
    doc_len = []
    for d_idx, doc in enumerate(corpus.documents):
        n = 0
        for tid in sorted(doc.term_counts):
            c = doc.term_counts[tid]
            tokens.extend([tid] * c)
            doc_of.extend([d_idx] * c)
            n += c
        doc_len.append(n)
    return (
        np.asarray(tokens, dtype=np.int64),
        np.asarray(doc_of, dtype=np.int64),
        np.asarray(doc_len, dtype=np.int64),
    )


def _estimate(n_kt, n_k, n_dk, doc_len, alpha, beta):
    n_terms = n_kt.shape[1]
    k = n_kt.shape[0]
    phi = (n_kt + beta) / (n_k[:, None] + n_terms * beta)
    theta = (n_dk + alpha) / (doc_len[:, None] + k * alpha)
    return phi, theta


def train(
    corpus: Corpus,
    k: int,
    alpha: Optional[float] = None,
    beta: float = 0.1,
    iterations: int = 1000,
    seed: int = 0,
    check_counts: bool = False,
    perplexity_every: int = 0,
) -> TopicModel | tuple[TopicModel, list[tuple[int, float]]]:
    """Collapsed Gibbs sampling; point estimate from the final state.

    alpha defaults to 50/k. With perplexity_every > 0, also returns a
    [(sweep, training perplexity)] trace.
    """
    if not corpus.documents:
        raise EmptyCorpus("cannot train on an empty corpus")
    if k < 2:
        raise InvalidK(f"k must be >= 2, got {k}")
    if alpha is None:
        alpha = 50.0 / k

    tokens, doc_of, doc_len = _flatten(corpus)
    n_docs = len(corpus.documents)
    n_terms = corpus.n_terms

    rng = np.random.default_rng(seed)
    z = rng.integers(0, k, size=tokens.shape[0]).astype(np.int64)
    n_dk = np.zeros((n_docs, k), dtype=np.int64)
    n_kt = np.zeros((k, n_terms), dtype=np.int64)
    n_k = np.zeros(k, dtype=np.int64)
    np.add.at(n_dk, (doc_of, z), 1)
    np.add.at(n_kt, (z, tokens), 1)
    np.add.at(n_k, z, 1)

    _seed_numba(seed)
    trace: list[tuple[int, float]] = []
    done = 0
    step = perplexity_every if perplexity_every > 0 else iterations
    while done < iterations:
        sweeps = min(step, iterations - done)
        _gibbs_sweeps(
            tokens, doc_of, z, n_dk, n_kt, n_k, doc_len, alpha, beta, sweeps,
            check_counts,
        )
        done += sweeps
        if perplexity_every > 0:
            phi, theta = _estimate(n_kt, n_k, n_dk, doc_len, alpha, beta)
            trace.append((done, _perplexity(corpus, phi, theta)))

    phi, theta = _estimate(n_kt, n_k, n_dk, doc_len, alpha, beta)
    model = TopicModel(
        k=k,
        phi=phi,
        theta=theta,
        doc_ids=[d.doc_id for d in corpus.documents],
        alpha=alpha,
        beta=beta,
        seed=seed,
        iterations=iterations,
    )
    if perplexity_every > 0:
        return model, trace
    return model


def _perplexity(corpus: Corpus, phi: np.ndarray, theta: np.ndarray) -> float:
    log_lik = 0.0
    n_tokens = 0
    for d_idx, doc in enumerate(corpus.documents):
        tids = np.fromiter(doc.term_counts.keys(), dtype=np.int64)
        counts = np.fromiter(doc.term_counts.values(), dtype=np.float64)
        p = theta[d_idx] @ phi[:, tids]
        log_lik += float(np.log(p) @ counts)
        n_tokens += doc.length
    return math.exp(-log_lik / n_tokens)


def fold_in(
    model: TopicModel, doc: Document, iterations: int = 50, seed: int = 0
) -> np.ndarray:
    """Infer a topic distribution for an unseen document with phi held
    fixed; returns the smoothed theta vector."""
    tokens = []
    for tid in sorted(doc.term_counts):
        if 0 <= tid < model.n_terms:
            tokens.extend([tid] * doc.term_counts[tid])
    if not tokens:
        raise NoKnownTerms(f"document {doc.doc_id!r} shares no terms with the model")
    tokens_arr = np.asarray(tokens, dtype=np.int64)

    rng = np.random.default_rng(seed)
    k = model.k
    z = rng.integers(0, k, size=len(tokens))
    n_x = np.bincount(z, minlength=k).astype(np.float64)
    phi_cols = model.phi[:, tokens_arr]  # (k, n_tokens)

    for _ in range(iterations):
        for i in range(len(tokens)):
            n_x[z[i]] -= 1
            weights = phi_cols[:, i] * (n_x + model.alpha)
            cum = np.cumsum(weights)
            u = rng.random() * cum[-1]
            new = int(np.searchsorted(cum, u, side="right"))
            new = min(new, k - 1)
            z[i] = new
            n_x[new] += 1

    return (n_x + model.alpha) / (len(tokens) + k * model.alpha)


# --- persistence -------------------------------------------------------------


def save_model(model: TopicModel, path: str) -> None:
    """Line-oriented text format; floats are written with repr so the
    read/write round-trip is bit-exact."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(
            f"{model.k} {model.n_terms} {model.n_documents} "
            f"{float(model.alpha)!r} {float(model.beta)!r} "
            f"{model.seed} {model.iterations}\n"
        )
        for doc_id in model.doc_ids:
            fh.write(doc_id + "\n")
        for row in model.phi:
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")
        for row in model.theta:
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")


def load_model(path: str) -> TopicModel:
    with open(path, encoding="utf-8") as fh:
        k, m, n, alpha, beta, seed, iterations = fh.readline().split()
        k, m, n = int(k), int(m), int(n)
        doc_ids = [fh.readline().rstrip("\n") for _ in range(n)]
        phi = np.array(
            [[float(v) for v in fh.readline().split()] for _ in range(k)]
        )
        theta = np.array(
            [[float(v) for v in fh.readline().split()] for _ in range(n)]
        )
    return TopicModel(
        k=k,
        phi=phi,
        theta=theta,
        doc_ids=doc_ids,
        alpha=float(alpha),
        beta=float(beta),
        seed=int(seed),
        iterations=int(iterations),
    )
