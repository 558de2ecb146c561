"""Text corpus handling: tokens, vocabulary, simplex embeddings, baselines.

Documents become points on the simplex over the vocabulary by smoothed
relative frequencies (a posterior-mean estimate of the underlying
multinomial), which is what the geometric machinery consumes.  The module
also provides the two classical baselines used for comparison: cosine
distance on TFIDF-weighted counts and Euclidean distance on the simplex
embeddings themselves.

Corpora load from either a directory tree ``root/<label>/<docid>.txt`` or
a JSON-lines file with ``id``, ``label``, and ``text`` fields per line.
A vocabulary built here can be padded with a dummy term so the number of
coordinates is even, which the normalizing-constant series requires; the
dummy never matches a real token.
"""

from __future__ import annotations

import csv
import json
import math
import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import CorpusFormatError, DataError, DimensionMismatchError, DomainError
from .geometry import SimplexPoint

# Dummy term used to pad a vocabulary to even size.  Tokens are
# alphanumeric runs, so the brackets can never collide with a real term.
PAD_TERM = "<pad>"

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

__all__ = [
    "PAD_TERM",
    "RawDocument",
    "Vocabulary",
    "DocumentVector",
    "EmbeddingConfig",
    "IdfWeights",
    "tokenize",
    "build_vocabulary",
    "count_document",
    "embed_document",
    "idf_weights",
    "tfidf_cosine_distance",
    "tf_l2_distance",
    "export_ranked_scores",
    "write_scores_csv",
    "load_corpus",
    "load_corpus_dir",
    "load_corpus_jsonl",
]


@dataclass(frozen=True)
class RawDocument:
    """A document as loaded: an identifier, a class label, and raw text."""

    doc_id: str
    label: str
    text: str


def tokenize(text: str) -> list[str]:
    """Lowercase and split into maximal alphanumeric runs.

    Underscores and all punctuation separate tokens; no stopword removal
    or stemming.  "C3PO-unit" tokenizes to ["c3po", "unit"].
    """
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class Vocabulary:
    """An ordered term list; term index is its coordinate on the simplex.

    Terms are unique and sorted; when ``padded`` is true the final term is
    the dummy ``PAD_TERM`` appended to make the size even.
    """

    terms: tuple[str, ...]
    padded: bool = False

    def __post_init__(self) -> None:
        if len(self.terms) < 2:
            raise DataError(f"vocabulary needs at least two terms, got {len(self.terms)}")
        if len(set(self.terms)) != len(self.terms):
            raise DataError("vocabulary terms must be unique")
        if self.padded and self.terms[-1] != PAD_TERM:
            raise DataError("padded vocabulary must end with the dummy term")
        object.__setattr__(
            self, "_index", {term: i for i, term in enumerate(self.terms)}
        )

    @property
    def size(self) -> int:
        return len(self.terms)

    def index_of(self, term: str) -> int | None:
        """Coordinate of ``term``, or None when out of vocabulary."""
        return self._index.get(term)

    def __contains__(self, term: str) -> bool:
        return term in self._index


def build_vocabulary(
    docs: Sequence[RawDocument], min_count: int = 1, pad: bool = True
) -> Vocabulary:
    """Collect terms with total corpus count >= ``min_count``, sorted.

    With ``pad`` (the default), a dummy term is appended when the size
    would be odd, so the simplex dimension suits the likelihood machinery.
    """
    if min_count < 1:
        raise DataError(f"min_count must be >= 1, got {min_count}")
    counts: Counter[str] = Counter()
    for doc in docs:
        counts.update(tokenize(doc.text))
    terms = sorted(t for t, c in counts.items() if c >= min_count)
    if not terms:
        raise DataError("no term reaches min_count; vocabulary would be empty")
    padded = False
    if pad and len(terms) % 2 != 0:
        terms.append(PAD_TERM)
        padded = True
    return Vocabulary(terms=tuple(terms), padded=padded)


@dataclass(frozen=True)
class DocumentVector:
    """Sparse in-vocabulary term counts of one document."""

    doc_id: str
    label: str
    counts: dict[int, int]
    total: int

    def __post_init__(self) -> None:
        if any(c <= 0 for c in self.counts.values()):
            raise DataError("document counts must be positive")
        if self.total != sum(self.counts.values()):
            raise DataError("document total does not match its counts")


def count_document(doc: RawDocument, vocab: Vocabulary) -> DocumentVector:
    """Tokenize and count a document against a vocabulary; unknown terms drop."""
    counts: Counter[int] = Counter()
    for token in tokenize(doc.text):
        idx = vocab.index_of(token)
        if idx is not None:
            counts[idx] += 1
    plain = dict(counts)
    return DocumentVector(
        doc_id=doc.doc_id, label=doc.label, counts=plain, total=sum(plain.values())
    )


@dataclass(frozen=True)
class EmbeddingConfig:
    """Smoothing strength for the simplex embedding; must be positive."""

    alpha: float = 0.01

    def __post_init__(self) -> None:
        if not (math.isfinite(self.alpha) and self.alpha > 0.0):
            raise DataError(f"alpha must be positive and finite, got {self.alpha}")


def embed_document(
    vec: DocumentVector, vocab: Vocabulary, config: EmbeddingConfig | None = None
) -> SimplexPoint:
    """Smoothed relative frequencies (count_i + alpha) / (total + alpha V).

    The result is always interior: every coordinate, including the dummy
    padding term, gets at least alpha mass.  A document with no
    in-vocabulary tokens has no usable signal and is rejected.
    """
    cfg = config or EmbeddingConfig()
    if vec.total == 0:
        raise DataError(f"document {vec.doc_id!r} has no in-vocabulary tokens")
    dense = np.zeros(vocab.size)
    for idx, count in vec.counts.items():
        if not 0 <= idx < vocab.size:
            raise DimensionMismatchError(
                f"count index {idx} outside vocabulary of size {vocab.size}"
            )
        dense[idx] = count
    dense += cfg.alpha
    return SimplexPoint(dense / (vec.total + cfg.alpha * vocab.size))


@dataclass(frozen=True)
class IdfWeights:
    """Inverse document frequencies ln(N / df) per vocabulary coordinate.

    Terms appearing in no document, the dummy padding term among them,
    get weight zero.
    """

    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(arr)) or np.any(arr < 0.0):
            raise DataError("idf weights must be finite and nonnegative")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @property
    def size(self) -> int:
        return self.values.size


def idf_weights(vectors: Sequence[DocumentVector], vocab: Vocabulary) -> IdfWeights:
    """Document frequencies over ``vectors``, turned into ln(N / df) weights."""
    if len(vectors) == 0:
        raise DataError("idf needs at least one document")
    df = np.zeros(vocab.size)
    for vec in vectors:
        for idx in vec.counts:
            if not 0 <= idx < vocab.size:
                raise DimensionMismatchError(
                    f"count index {idx} outside vocabulary of size {vocab.size}"
                )
            df[idx] += 1.0
    values = np.zeros(vocab.size)
    seen = df > 0.0
    values[seen] = np.log(len(vectors) / df[seen])
    return IdfWeights(values=values)


def _weighted_dense(vec: DocumentVector, idf: IdfWeights) -> np.ndarray:
    dense = np.zeros(idf.size)
    for idx, count in vec.counts.items():
        if not 0 <= idx < idf.size:
            raise DimensionMismatchError(
                f"count index {idx} outside idf weights of size {idf.size}"
            )
        dense[idx] = count * idf.values[idx]
    return dense


def tfidf_cosine_distance(a: DocumentVector, b: DocumentVector, idf: IdfWeights) -> float:
    """One minus the cosine of the IDF-weighted count vectors; in [0, 1].

    A document whose every term has zero IDF weight (for instance, terms
    present in all documents) has no direction and is rejected.
    """
    u = _weighted_dense(a, idf)
    v = _weighted_dense(b, idf)
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise DomainError("tfidf vector has zero norm; no weighted terms")
    cos = float(u @ v) / (nu * nv)
    return 1.0 - min(1.0, max(-1.0, cos))


def tf_l2_distance(a: SimplexPoint, b: SimplexPoint) -> float:
    """Euclidean distance between simplex embeddings."""
    if a.dim != b.dim:
        raise DimensionMismatchError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return float(np.linalg.norm(a.coords - b.coords))


def export_ranked_scores(
    scores: Sequence[float] | np.ndarray, vocab: Vocabulary
) -> list[tuple[int, str, float]]:
    """Rank terms by score, descending, ties broken by term; rows (rank, term, score)."""
    arr = np.asarray(scores, dtype=np.float64)
    if arr.ndim != 1 or arr.size != vocab.size:
        raise DimensionMismatchError(
            f"scores must have one entry per term, got {arr.shape} for {vocab.size} terms"
        )
    if not np.all(np.isfinite(arr)):
        raise DataError("scores must be finite")
    order = sorted(zip(vocab.terms, arr), key=lambda pair: (-pair[1], pair[0]))
    return [(rank, term, float(score)) for rank, (term, score) in enumerate(order, 1)]


def write_scores_csv(path: str | Path, rows: Sequence[tuple[int, str, float]]) -> None:
    """Write ranked rows under the header ``rank,term,score``."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["rank", "term", "score"])
        for rank, term, score in rows:
            writer.writerow([rank, term, repr(score)])


def load_corpus_dir(root: str | Path) -> list[RawDocument]:
    """Load ``root/<label>/<docid>.txt``; labels and files in sorted order."""
    base = Path(root)
    if not base.is_dir():
        raise CorpusFormatError(f"corpus root {base} is not a directory")
    docs: list[RawDocument] = []
    label_dirs = sorted(p for p in base.iterdir() if p.is_dir())
    if not label_dirs:
        raise CorpusFormatError(f"corpus root {base} has no label directories")
    for label_dir in label_dirs:
        for path in sorted(label_dir.glob("*.txt")):
            docs.append(
                RawDocument(
                    doc_id=path.stem,
                    label=label_dir.name,
                    text=path.read_text(encoding="utf-8"),
                )
            )
    if not docs:
        raise CorpusFormatError(f"corpus root {base} contains no .txt documents")
    return docs


def load_corpus_jsonl(path: str | Path) -> list[RawDocument]:
    """Load one JSON object per line with ``id``, ``label``, and ``text`` fields."""
    source = Path(path)
    if not source.is_file():
        raise CorpusFormatError(f"corpus file {source} does not exist")
    docs: list[RawDocument] = []
    with open(source, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"{source}: line {lineno}: invalid JSON: {exc}")
            if not isinstance(record, dict):
                raise CorpusFormatError(f"{source}: line {lineno}: expected an object")
            missing = [key for key in ("id", "label", "text") if key not in record]
            if missing:
                raise CorpusFormatError(
                    f"{source}: line {lineno}: missing fields {missing}"
                )
            doc_id, label, text = record["id"], record["label"], record["text"]
            if not all(isinstance(v, str) for v in (doc_id, label, text)):
                raise CorpusFormatError(
                    f"{source}: line {lineno}: id, label, and text must be strings"
                )
            docs.append(RawDocument(doc_id=doc_id, label=label, text=text))
    if not docs:
        raise CorpusFormatError(f"corpus file {source} contains no documents")
    return docs


def load_corpus(path: str | Path, fmt: str) -> list[RawDocument]:
    """Dispatch on ``fmt``: "dir" for a directory tree, "jsonl" for JSON lines."""
    if fmt == "dir":
        return load_corpus_dir(path)
    if fmt == "jsonl":
        return load_corpus_jsonl(path)
    raise DataError(f"unknown corpus format {fmt!r}; expected 'dir' or 'jsonl'")
