"""Nearest-neighbor evaluation of learned and baseline document distances.

The experiment repeatedly splits a labeled corpus into a small training
set and a large held-out set, fits whatever each distance needs on the
training half only (the reweighting parameter for the learned geodesic,
document frequencies for TFIDF), classifies the held-out documents by
nearest training neighbor, and reports mean and spread of the error rate
over repeats.  Splits are stratified by label and driven by a seeded
generator, so a report is reproducible from its seed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .corpus import (
    DocumentVector,
    EmbeddingConfig,
    IdfWeights,
    RawDocument,
    Vocabulary,
    build_vocabulary,
    count_document,
    embed_document,
    export_ranked_scores,
    idf_weights,
)
from .errors import DataError, DimensionMismatchError, DomainError
from .geometry import MetricParam, SimplexPoint
from .optimize import OptimizerConfig, estimate_theta

VALID_KINDS = ("learned_geodesic", "fisher", "tfidf_cosine", "tf_l2")

# Query rows per block when materializing pairwise differences.
_QUERY_BLOCK = 64

__all__ = [
    "VALID_KINDS",
    "DistanceKind",
    "EmbeddedDocument",
    "EmbeddedCorpus",
    "ReportRow",
    "ExperimentReport",
    "ScoreComparison",
    "embed_corpus",
    "distance_matrix",
    "nn_classify",
    "run_experiment",
    "score_comparison",
]


@dataclass(frozen=True)
class DistanceKind:
    """One of the comparable document distances.

    ``learned_geodesic`` may carry a fixed metric parameter; without one
    the experiment fits it per training split.  The other kinds carry
    nothing: ``fisher`` is the geodesic at the uniform parameter,
    ``tfidf_cosine`` and ``tf_l2`` are the classical baselines.
    """

    name: str
    metric: MetricParam | None = None

    def __post_init__(self) -> None:
        if self.name not in VALID_KINDS:
            raise DataError(f"unknown distance kind {self.name!r}; expected {VALID_KINDS}")
        if self.metric is not None and self.name != "learned_geodesic":
            raise DataError(f"distance kind {self.name!r} does not take a metric")

    def key(self) -> tuple:
        weights = None if self.metric is None else tuple(self.metric.weights)
        return (self.name, weights)


@dataclass(frozen=True)
class EmbeddedDocument:
    """A document's sparse counts together with its simplex embedding."""

    vector: DocumentVector
    point: SimplexPoint


class EmbeddedCorpus:
    """Embedded documents with dense caches for vectorized distances."""

    def __init__(self, docs: Sequence[EmbeddedDocument], vocab: Vocabulary):
        if len(docs) == 0:
            raise DataError("embedded corpus needs at least one document")
        for doc in docs:
            if doc.point.coords.size != vocab.size:
                raise DimensionMismatchError(
                    "embedding size does not match the vocabulary"
                )
        self.docs = tuple(docs)
        self.vocab = vocab
        self.points = np.stack([doc.point.coords for doc in self.docs])
        counts = np.zeros((len(self.docs), vocab.size))
        for row, doc in enumerate(self.docs):
            for idx, count in doc.vector.counts.items():
                counts[row, idx] = count
        counts.flags.writeable = False
        self.points.flags.writeable = False
        self.counts = counts
        self.labels = tuple(doc.vector.label for doc in self.docs)

    def __len__(self) -> int:
        return len(self.docs)

    def subset(self, indices: Sequence[int]) -> "EmbeddedCorpus":
        return EmbeddedCorpus([self.docs[i] for i in indices], self.vocab)


def embed_corpus(
    docs: Sequence[RawDocument],
    vocab: Vocabulary,
    config: EmbeddingConfig | None = None,
) -> EmbeddedCorpus:
    """Count and embed every document against one vocabulary."""
    cfg = config or EmbeddingConfig()
    embedded = []
    for doc in docs:
        vector = count_document(doc, vocab)
        embedded.append(EmbeddedDocument(vector=vector, point=embed_document(vector, vocab, cfg)))
    return EmbeddedCorpus(embedded, vocab)


def _sphere_rows(points: np.ndarray, weights: np.ndarray) -> np.ndarray:
    reweighted = points * weights[np.newaxis, :]
    reweighted /= reweighted.sum(axis=1, keepdims=True)
    return np.sqrt(reweighted)


def distance_matrix(
    kind: DistanceKind,
    queries: EmbeddedCorpus,
    refs: EmbeddedCorpus,
    idf: IdfWeights | None = None,
    metric: MetricParam | None = None,
) -> np.ndarray:
    """Pairwise distances, queries in rows and references in columns.

    ``tfidf_cosine`` needs ``idf``; ``learned_geodesic`` needs a metric,
    either carried by the kind or passed explicitly (the explicit one
    wins, which is how the experiment supplies per-split fits).
    """
    if queries.vocab.size != refs.vocab.size:
        raise DimensionMismatchError("query and reference vocabularies differ in size")
    if kind.name in ("learned_geodesic", "fisher"):
        if kind.name == "fisher":
            lam = np.full(queries.vocab.size, 1.0 / queries.vocab.size)
        else:
            param = metric if metric is not None else kind.metric
            if param is None:
                raise DataError("learned_geodesic distance needs a metric parameter")
            if param.weights.size != queries.vocab.size:
                raise DimensionMismatchError("metric size does not match the vocabulary")
            lam = param.weights
        qs = _sphere_rows(queries.points, lam)
        rs = _sphere_rows(refs.points, lam)
        return np.arccos(np.clip(qs @ rs.T, -1.0, 1.0))
    if kind.name == "tfidf_cosine":
        if idf is None:
            raise DataError("tfidf_cosine distance needs idf weights")
        if idf.size != queries.vocab.size:
            raise DimensionMismatchError("idf size does not match the vocabulary")
        qw = queries.counts * idf.values[np.newaxis, :]
        rw = refs.counts * idf.values[np.newaxis, :]
        qn = np.linalg.norm(qw, axis=1)
        rn = np.linalg.norm(rw, axis=1)
        if np.any(qn == 0.0) or np.any(rn == 0.0):
            raise DomainError("a document has zero tfidf norm; no weighted terms")
        cos = (qw / qn[:, np.newaxis]) @ (rw / rn[:, np.newaxis]).T
        return 1.0 - np.clip(cos, -1.0, 1.0)
    # tf_l2: exact differences, blocked to bound memory
    out = np.empty((len(queries), len(refs)))
    for start in range(0, len(queries), _QUERY_BLOCK):
        stop = min(len(queries), start + _QUERY_BLOCK)
        diff = queries.points[start:stop, np.newaxis, :] - refs.points[np.newaxis, :, :]
        out[start:stop] = np.sqrt((diff * diff).sum(axis=2))
    return out


def _vote(distances: np.ndarray, labels: Sequence[str], k: int) -> str:
    order = np.argsort(distances, kind="stable")[:k]
    if k == 1:
        return labels[int(order[0])]
    tally: dict[str, int] = {}
    for idx in order:
        label = labels[int(idx)]
        tally[label] = tally.get(label, 0) + 1
    best = max(tally.values())
    winners = {label for label, count in tally.items() if count == best}
    for idx in order:
        label = labels[int(idx)]
        if label in winners:
            return label
    raise AssertionError("unreachable: some neighbor label must win")


def nn_classify(
    train: EmbeddedCorpus,
    query: EmbeddedDocument,
    kind: DistanceKind,
    idf: IdfWeights | None = None,
    metric: MetricParam | None = None,
    k: int = 1,
) -> str:
    """Label of the query under k-nearest-neighbor vote, default k = 1.

    Ties, in distance or in the vote, resolve toward the lowest training
    index, so the result is deterministic.
    """
    if k < 1:
        raise DataError(f"k must be >= 1, got {k}")
    singleton = EmbeddedCorpus([query], train.vocab)
    row = distance_matrix(kind, singleton, train, idf=idf, metric=metric)[0]
    return _vote(row, train.labels, min(k, len(train)))


def _stratified_indices(
    labels: Sequence[str], size: int, rng: np.random.Generator
) -> list[int]:
    """Sample ``size`` indices without replacement, proportionally per label.

    Every label gets at least one slot; remainders go to the largest
    fractional quotas, ties broken by label order.  Deterministic given
    the generator state.
    """
    by_label: dict[str, list[int]] = {}
    for i, label in enumerate(labels):
        by_label.setdefault(label, []).append(i)
    names = sorted(by_label)
    total = len(labels)
    if size < len(names):
        raise DataError(
            f"training size {size} cannot cover {len(names)} labels with one doc each"
        )
    if size >= total:
        raise DataError(f"training size {size} must leave held-out documents")
    quotas = {name: size * len(by_label[name]) / total for name in names}
    alloc = {name: max(1, math.floor(quotas[name])) for name in names}
    # trim overshoot (floors plus the one-per-label floor can exceed size)
    order_desc = sorted(names, key=lambda n: (-alloc[n], n))
    while sum(alloc.values()) > size:
        for name in order_desc:
            if alloc[name] > 1:
                alloc[name] -= 1
                break
        order_desc = sorted(names, key=lambda n: (-alloc[n], n))
    # hand out the remainder by largest fractional part
    frac_order = sorted(names, key=lambda n: (-(quotas[n] - math.floor(quotas[n])), n))
    cursor = 0
    while sum(alloc.values()) < size:
        name = frac_order[cursor % len(names)]
        cursor += 1
        if alloc[name] < len(by_label[name]):
            alloc[name] += 1
    for name in names:
        if alloc[name] > len(by_label[name]):
            raise DataError(
                f"label {name!r} has only {len(by_label[name])} documents, "
                f"fewer than its allocation {alloc[name]}"
            )
    chosen: list[int] = []
    for name in names:
        pool = np.array(by_label[name])
        picked = rng.choice(pool, size=alloc[name], replace=False)
        chosen.extend(int(i) for i in picked)
    return sorted(chosen)


@dataclass(frozen=True)
class ReportRow:
    """Error-rate summary for one (training size, distance kind) cell."""

    size: int
    kind: str
    errors: tuple[float, ...]
    mean_error: float
    std_error: float

    @property
    def repeats(self) -> int:
        return len(self.errors)


@dataclass(frozen=True)
class ExperimentReport:
    """All cells of one experiment plus the configuration that produced it."""

    rows: tuple[ReportRow, ...]
    seed: int
    config: Mapping[str, object]

    def row(self, size: int, kind: str) -> ReportRow:
        for row in self.rows:
            if row.size == size and row.kind == kind:
                return row
        raise KeyError(f"no row for size {size}, kind {kind!r}")

    def to_csv(self, path: str | Path) -> None:
        lines = ["size,kind,mean_error,std_error,repeats,seed"]
        for row in self.rows:
            lines.append(
                f"{row.size},{row.kind},{row.mean_error!r},{row.std_error!r},"
                f"{row.repeats},{self.seed}"
            )
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    def to_json(self, path: str | Path) -> None:
        payload = {
            "seed": self.seed,
            "config": dict(self.config),
            "rows": [
                {
                    "size": row.size,
                    "kind": row.kind,
                    "mean_error": row.mean_error,
                    "std_error": row.std_error,
                    "repeats": row.repeats,
                    "errors": list(row.errors),
                }
                for row in self.rows
            ],
        }
        Path(path).write_text(
            json.dumps(payload, sort_keys=True, separators=(",", ": "), indent=1) + "\n",
            encoding="utf-8",
        )


def _dedup_kinds(kinds: Sequence[DistanceKind]) -> list[DistanceKind]:
    seen = set()
    out = []
    for kind in kinds:
        key = kind.key()
        if key not in seen:
            seen.add(key)
            out.append(kind)
    return out


def run_experiment(
    corpus: Sequence[RawDocument],
    sizes: Sequence[int],
    repeats: int,
    seed: int,
    kinds: Sequence[DistanceKind],
    *,
    min_count: int = 1,
    alpha: float = 0.01,
    optimizer: OptimizerConfig | None = None,
    fixed_metric: MetricParam | None = None,
    k_neighbors: int = 1,
) -> ExperimentReport:
    """Repeated-split nearest-neighbor comparison of the requested distances.

    The vocabulary and embeddings come from the full corpus once (they
    are per-document quantities); everything estimated from data, the
    reweighting parameter and the document frequencies, is refit on each
    training split.  Repeat r draws its split from
    ``default_rng(seed + r)``.  Passing ``fixed_metric`` (or a kind that
    carries one) skips the per-split fit for the learned geodesic.
    """
    if repeats < 1:
        raise DataError(f"repeats must be >= 1, got {repeats}")
    if len(sizes) == 0:
        raise DataError("sizes must be nonempty")
    if k_neighbors < 1:
        raise DataError(f"k_neighbors must be >= 1, got {k_neighbors}")
    for size in sizes:
        if size < 1 or size >= len(corpus):
            raise DataError(
                f"training size {size} must lie in [1, corpus size {len(corpus)})"
            )
    use_kinds = _dedup_kinds(kinds)
    if not use_kinds:
        raise DataError("kinds must be nonempty")

    vocab = build_vocabulary(corpus, min_count=min_count, pad=True)
    embedded = embed_corpus(corpus, vocab, EmbeddingConfig(alpha))
    needs_fit = any(
        kind.name == "learned_geodesic" and kind.metric is None for kind in use_kinds
    ) and fixed_metric is None

    errors: dict[tuple[int, str], list[float]] = {
        (size, kind.name): [] for size in sizes for kind in use_kinds
    }
    for size in sizes:
        for repeat in range(repeats):
            rng = np.random.default_rng(seed + repeat)
            train_idx = _stratified_indices(embedded.labels, size, rng)
            test_idx = sorted(set(range(len(embedded))) - set(train_idx))
            train = embedded.subset(train_idx)
            test = embedded.subset(test_idx)
            idf = idf_weights([doc.vector for doc in train.docs], vocab)
            split_metric = fixed_metric
            if needs_fit:
                cfg = optimizer or OptimizerConfig()
                fit = estimate_theta([doc.point for doc in train.docs], cfg)
                split_metric = fit.lambda_metric
            truth = np.array(test.labels)
            for kind in use_kinds:
                matrix = distance_matrix(kind, test, train, idf=idf, metric=split_metric)
                predictions = np.array(
                    [_vote(matrix[i], train.labels, k_neighbors) for i in range(len(test))]
                )
                errors[(size, kind.name)].append(float(np.mean(predictions != truth)))

    rows = []
    for size in sizes:
        for kind in use_kinds:
            errs = errors[(size, kind.name)]
            mean = float(np.mean(errs))
            std = float(np.std(errs, ddof=1)) if len(errs) > 1 else 0.0
            rows.append(
                ReportRow(
                    size=size,
                    kind=kind.name,
                    errors=tuple(errs),
                    mean_error=mean,
                    std_error=std,
                )
            )
    config = {
        "sizes": list(sizes),
        "repeats": repeats,
        "kinds": [kind.name for kind in use_kinds],
        "min_count": min_count,
        "alpha": alpha,
        "k_neighbors": k_neighbors,
        "corpus_size": len(corpus),
        "vocabulary_size": vocab.size,
        "padded": vocab.padded,
        "fixed_metric": fixed_metric is not None
        or any(kind.metric is not None for kind in use_kinds),
        "optimizer": {
            "step_size": (optimizer or OptimizerConfig()).step_size,
            "backtrack": (optimizer or OptimizerConfig()).backtrack,
            "tolerance": (optimizer or OptimizerConfig()).tolerance,
            "max_iterations": (optimizer or OptimizerConfig()).max_iterations,
        },
    }
    return ExperimentReport(rows=tuple(rows), seed=seed, config=config)


@dataclass(frozen=True)
class ScoreComparison:
    """Agreement between the learned weights and IDF as term rankings.

    Rankings exclude the dummy padding term.  ``lambda_top`` holds the
    terms with the largest learned weights (the most discriminative under
    the model); overlaps are Jaccard similarities of the top and bottom
    ``top_k`` term sets of the two rankings.
    """

    top_k: int
    lambda_top: tuple[tuple[str, float], ...]
    lambda_bottom: tuple[tuple[str, float], ...]
    idf_top: tuple[tuple[str, float], ...]
    idf_bottom: tuple[tuple[str, float], ...]
    jaccard_top: float
    jaccard_bottom: float

    def as_dict(self) -> dict:
        return {
            "top_k": self.top_k,
            "lambda_top": [[t, s] for t, s in self.lambda_top],
            "lambda_bottom": [[t, s] for t, s in self.lambda_bottom],
            "idf_top": [[t, s] for t, s in self.idf_top],
            "idf_bottom": [[t, s] for t, s in self.idf_bottom],
            "jaccard_top": self.jaccard_top,
            "jaccard_bottom": self.jaccard_bottom,
        }


def _jaccard(a: Sequence[str], b: Sequence[str]) -> float:
    sa, sb = set(a), set(b)
    union = sa | sb
    return len(sa & sb) / len(union) if union else 1.0


def score_comparison(
    metric: MetricParam, idf: IdfWeights, vocab: Vocabulary, top_k: int = 20
) -> ScoreComparison:
    """Compare the learned weight ranking against the IDF ranking."""
    if metric.weights.size != vocab.size or idf.size != vocab.size:
        raise DimensionMismatchError("metric, idf, and vocabulary sizes must agree")
    lam_rows = export_ranked_scores(metric.weights, vocab)
    idf_rows = export_ranked_scores(idf.values, vocab)
    if vocab.padded:
        lam_rows = [row for row in lam_rows if row[1] != vocab.terms[-1]]
        idf_rows = [row for row in idf_rows if row[1] != vocab.terms[-1]]
    usable = len(lam_rows)
    if not 1 <= top_k <= usable:
        raise DataError(f"top_k must lie in [1, {usable}], got {top_k}")
    lam_top = tuple((t, s) for _, t, s in lam_rows[:top_k])
    lam_bottom = tuple((t, s) for _, t, s in lam_rows[-top_k:])
    idf_top = tuple((t, s) for _, t, s in idf_rows[:top_k])
    idf_bottom = tuple((t, s) for _, t, s in idf_rows[-top_k:])
    return ScoreComparison(
        top_k=top_k,
        lambda_top=lam_top,
        lambda_bottom=lam_bottom,
        idf_top=idf_top,
        idf_bottom=idf_bottom,
        jaccard_top=_jaccard([t for t, _ in lam_top], [t for t, _ in idf_top]),
        jaccard_bottom=_jaccard([t for t, _ in lam_bottom], [t for t, _ in idf_bottom]),
    )
