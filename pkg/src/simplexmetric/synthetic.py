"""Synthetic two-class corpus with stopword-dominated documents.

The generator produces the regime the learned metric is built for: a
handful of stopword-like terms dominates every document regardless of
class, a block of bursty filler terms adds class-independent weight that
plain count vectors mistake for signal, and the actual class evidence
lives in rare discriminative terms that each appear in a minority of the
documents of one class.  Euclidean distance on term frequencies is then
dominated by stopword variation, TFIDF cosine is diluted by the filler
burstiness, while a metric that learns to shrink the common coordinates
and stretch the rare ones keeps the class evidence in view.

Term names are plain lowercase alphanumerics so they survive
tokenization unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import RawDocument
from .errors import DataError

__all__ = ["SyntheticConfig", "synthetic_two_class_corpus"]


@dataclass(frozen=True)
class SyntheticConfig:
    """Shape and intensity knobs of the generated corpus.

    Defaults give 400 documents over exactly 200 distinct terms: 20
    stopwords, 2 x 20 class-discriminative terms, 100 filler terms, and
    40 background terms.
    """

    n_docs: int = 400
    n_stopwords: int = 20
    n_class_terms: int = 20
    n_filler: int = 100
    n_background: int = 40
    stop_base: int = 4
    stop_extra: float = 8.0
    class_presence: float = 0.35
    class_extra: float = 1.0
    cross_presence: float = 0.02
    filler_presence: float = 0.30
    filler_extra: float = 2.5
    background_presence: float = 0.15
    background_extra: float = 0.5

    def __post_init__(self) -> None:
        if self.n_docs < 2 or self.n_docs % 2 != 0:
            raise DataError("n_docs must be even and >= 2 for two balanced classes")
        for name in ("n_stopwords", "n_class_terms", "n_filler", "n_background"):
            if getattr(self, name) < 1:
                raise DataError(f"{name} must be >= 1")
        for name in (
            "class_presence",
            "cross_presence",
            "filler_presence",
            "background_presence",
        ):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise DataError(f"{name} must lie in [0, 1], got {value}")

    @property
    def vocabulary_size(self) -> int:
        return self.n_stopwords + 2 * self.n_class_terms + self.n_filler + self.n_background


def _emit(tokens: list[str], term: str, count: int) -> None:
    if count > 0:
        tokens.extend([term] * count)


def synthetic_two_class_corpus(
    config: SyntheticConfig | None = None, seed: int = 7
) -> list[RawDocument]:
    """Generate the corpus; deterministic for a given configuration and seed.

    Labels alternate between "alpha" and "beta" so every prefix is nearly
    balanced and stratified splits are exact.  Every document contains
    every stopword at least ``stop_base`` times; class terms appear in a
    ``class_presence`` fraction of their own class and leak into the
    other class with probability ``cross_presence``.
    """
    cfg = config or SyntheticConfig()
    rng = np.random.default_rng(seed)
    stop_terms = [f"stop{i:02d}" for i in range(cfg.n_stopwords)]
    class_terms = {
        "alpha": [f"alpha{i:02d}" for i in range(cfg.n_class_terms)],
        "beta": [f"beta{i:02d}" for i in range(cfg.n_class_terms)],
    }
    filler_terms = [f"fill{i:03d}" for i in range(cfg.n_filler)]
    background_terms = [f"bg{i:03d}" for i in range(cfg.n_background)]

    docs: list[RawDocument] = []
    for index in range(cfg.n_docs):
        label = "alpha" if index % 2 == 0 else "beta"
        other = "beta" if label == "alpha" else "alpha"
        tokens: list[str] = []
        for term in stop_terms:
            _emit(tokens, term, cfg.stop_base + int(rng.poisson(cfg.stop_extra)))
        for term in class_terms[label]:
            if rng.random() < cfg.class_presence:
                _emit(tokens, term, 1 + int(rng.poisson(cfg.class_extra)))
        for term in class_terms[other]:
            if rng.random() < cfg.cross_presence:
                _emit(tokens, term, 1)
        for term in filler_terms:
            if rng.random() < cfg.filler_presence:
                _emit(tokens, term, 1 + int(rng.poisson(cfg.filler_extra)))
        for term in background_terms:
            if rng.random() < cfg.background_presence:
                _emit(tokens, term, 1 + int(rng.poisson(cfg.background_extra)))
        docs.append(
            RawDocument(doc_id=f"doc{index:04d}", label=label, text=" ".join(tokens))
        )
    return docs
