"""Shared fixtures.

The synthetic benchmark experiment takes a couple of minutes (sixty
metric fits), so it is computed once per session and shared between the
harness invariant tests and the acceptance suite.  Seeds are pinned;
every dependent assertion sees byte-identical numbers across runs.
"""

from __future__ import annotations

import time
from typing import NamedTuple

import numpy as np
import pytest

from simplexmetric import (
    VALID_KINDS,
    DistanceKind,
    EmbeddingConfig,
    build_vocabulary,
    embed_corpus,
    estimate_theta,
    idf_weights,
    run_experiment,
    synthetic_two_class_corpus,
)

CORPUS_SEED = 7
EXPERIMENT_SEED = 11
SIZES = (20, 40, 80)
REPEATS = 20


@pytest.fixture(scope="session")
def synthetic_docs():
    return synthetic_two_class_corpus(seed=CORPUS_SEED)


class TimedReport(NamedTuple):
    report: object
    seconds: float


@pytest.fixture(scope="session")
def synthetic_benchmark(synthetic_docs):
    kinds = [DistanceKind(name) for name in VALID_KINDS]
    start = time.perf_counter()
    report = run_experiment(
        synthetic_docs,
        sizes=list(SIZES),
        repeats=REPEATS,
        seed=EXPERIMENT_SEED,
        kinds=kinds,
    )
    return TimedReport(report=report, seconds=time.perf_counter() - start)


@pytest.fixture(scope="session")
def synthetic_report(synthetic_benchmark):
    return synthetic_benchmark.report


@pytest.fixture(scope="session")
def synthetic_fit(synthetic_docs):
    """One fit on a fixed balanced 80-document split, with its vocabulary and IDF."""
    vocab = build_vocabulary(synthetic_docs, min_count=1, pad=True)
    embedded = embed_corpus(synthetic_docs, vocab, EmbeddingConfig(0.01))
    train = embedded.subset(range(80))
    fit = estimate_theta([doc.point for doc in train.docs])
    idf = idf_weights([doc.vector for doc in train.docs], vocab)
    return vocab, train, fit, idf
