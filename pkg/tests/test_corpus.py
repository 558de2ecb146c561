"""Tokenization, vocabulary, embeddings, and baseline distances."""

from __future__ import annotations

import json
import math

import numpy as np
import pytest

from simplexmetric import (
    CorpusFormatError,
    DataError,
    DomainError,
    EmbeddingConfig,
    RawDocument,
    Vocabulary,
    build_vocabulary,
    count_document,
    embed_document,
    export_ranked_scores,
    idf_weights,
    load_corpus,
    load_corpus_dir,
    load_corpus_jsonl,
    tf_l2_distance,
    tfidf_cosine_distance,
    tokenize,
    write_scores_csv,
)

DOCS = [
    RawDocument("d0", "a", "apple banana apple"),
    RawDocument("d1", "a", "apple cherry"),
    RawDocument("d2", "b", "banana banana dates"),
    RawDocument("d3", "b", "cherry dates dates"),
]


class TestTokenize:
    def test_splits_on_punctuation_and_lowercases(self):
        assert tokenize("C3PO-unit") == ["c3po", "unit"]

    def test_underscore_is_a_separator(self):
        assert tokenize("snake_case words") == ["snake", "case", "words"]

    def test_empty_text(self):
        assert tokenize("") == []
        assert tokenize("  ...  ") == []

    def test_unicode_words_kept(self):
        assert tokenize("Café au lait!") == ["café", "au", "lait"]

    def test_digits_stay_inside_tokens(self):
        assert tokenize("model v2 beats v1.5") == ["model", "v2", "beats", "v1", "5"]


class TestVocabulary:
    def test_sorted_unique_terms(self):
        vocab = build_vocabulary(DOCS, pad=False)
        assert vocab.terms == ("apple", "banana", "cherry", "dates")
        assert not vocab.padded

    def test_padding_forces_even_size(self):
        docs = DOCS + [RawDocument("d4", "a", "elder")]
        vocab = build_vocabulary(docs)
        assert vocab.size == 6
        assert "<pad>" in vocab.terms
        even = build_vocabulary(DOCS)
        assert even.size == 4 and not even.padded

    def test_min_count_filters(self):
        vocab = build_vocabulary(DOCS, min_count=2, pad=False)
        # apple x3, banana x3, cherry x2, dates x3 all survive; raise the bar
        vocab3 = build_vocabulary(DOCS, min_count=3, pad=False)
        assert vocab.terms == ("apple", "banana", "cherry", "dates")
        assert vocab3.terms == ("apple", "banana", "dates")

    def test_index_lookup(self):
        vocab = build_vocabulary(DOCS, pad=False)
        assert vocab.index_of("banana") == 1
        assert "banana" in vocab
        assert "kiwi" not in vocab
        assert vocab.index_of("kiwi") is None

    def test_empty_vocabulary_rejected(self):
        with pytest.raises(DataError):
            build_vocabulary([RawDocument("d0", "a", "...")])


class TestEmbedding:
    def test_smoothed_count_anchor(self):
        """counts (3,0,0,0), alpha 0.01, V=4: first coordinate (3+.01)/(3+.04)."""
        vocab = Vocabulary(("a", "b", "c", "d"), padded=False)
        doc = count_document(RawDocument("x", "l", "a a a"), vocab)
        point = embed_document(doc, vocab, EmbeddingConfig(alpha=0.01))
        np.testing.assert_allclose(point.coords[0], 3.01 / 3.04, rtol=1e-15)
        np.testing.assert_allclose(point.coords[1:], 0.01 / 3.04, rtol=1e-15)
        assert math.isclose(point.coords.sum(), 1.0, rel_tol=1e-12)

    def test_out_of_vocabulary_tokens_ignored(self):
        vocab = Vocabulary(("a", "b"), padded=False)
        doc = count_document(RawDocument("x", "l", "a kiwi a"), vocab)
        assert doc.total == 2
        assert doc.counts == {0: 2}

    def test_no_in_vocabulary_tokens_rejected(self):
        vocab = Vocabulary(("a", "b"), padded=False)
        doc = count_document(RawDocument("x", "l", "kiwi mango"), vocab)
        with pytest.raises(DataError):
            embed_document(doc, vocab, EmbeddingConfig())

    def test_interior_even_with_zero_counts(self):
        vocab = Vocabulary(("a", "b", "c", "d"), padded=False)
        doc = count_document(RawDocument("x", "l", "a b"), vocab)
        point = embed_document(doc, vocab, EmbeddingConfig())
        assert point.interior

    def test_alpha_validation(self):
        with pytest.raises(DataError):
            EmbeddingConfig(alpha=0.0)
        with pytest.raises(DataError):
            EmbeddingConfig(alpha=-1.0)


class TestIdf:
    def test_log_ratio_anchor(self):
        vocab = build_vocabulary(DOCS, pad=False)
        vectors = [count_document(d, vocab) for d in DOCS]
        idf = idf_weights(vectors, vocab)
        # apple appears in 2 of 4 documents
        assert math.isclose(idf.values[0], math.log(2.0), rel_tol=1e-15)
        assert math.isclose(idf.values[1], math.log(2.0), rel_tol=1e-15)

    def test_unseen_term_gets_zero(self):
        vocab = Vocabulary(("apple", "zzz"), padded=False)
        vectors = [count_document(d, vocab) for d in DOCS]
        idf = idf_weights(vectors, vocab)
        assert idf.values[1] == 0.0

    def test_pad_term_gets_zero(self):
        docs = DOCS + [RawDocument("d4", "a", "elder")]
        vocab = build_vocabulary(docs)
        vectors = [count_document(d, vocab) for d in docs]
        idf = idf_weights(vectors, vocab)
        assert idf.values[vocab.index_of("<pad>")] == 0.0

    def test_empty_input_rejected(self):
        vocab = build_vocabulary(DOCS, pad=False)
        with pytest.raises(DataError):
            idf_weights([], vocab)


class TestBaselineDistances:
    def counted(self, vocab=None, docs=DOCS):
        vocab = vocab or build_vocabulary(DOCS, pad=False)
        vectors = [count_document(d, vocab) for d in docs]
        return vectors, idf_weights(vectors, vocab)

    def test_tfidf_zero_on_identical(self):
        vectors, idf = self.counted()
        assert math.isclose(tfidf_cosine_distance(vectors[0], vectors[0], idf), 0.0, abs_tol=1e-12)

    def test_tfidf_one_on_disjoint_support(self):
        vocab = Vocabulary(("a", "b", "c", "d"), padded=False)
        docs = [RawDocument("x", "l", "a a b"), RawDocument("y", "l", "c d d")]
        (a, b), idf = self.counted(vocab=vocab, docs=docs)
        assert math.isclose(tfidf_cosine_distance(a, b, idf), 1.0, abs_tol=1e-12)

    def test_tfidf_symmetry(self):
        vectors, idf = self.counted()
        a, b = vectors[0], vectors[2]
        assert tfidf_cosine_distance(a, b, idf) == tfidf_cosine_distance(b, a, idf)

    def test_tfidf_zero_norm_rejected(self):
        """A document whose every term has zero idf has no direction."""
        vocab = Vocabulary(("common", "rare"), padded=False)
        docs = [RawDocument(f"d{i}", "l", "common") for i in range(3)]
        vectors, idf = self.counted(vocab=vocab, docs=docs)
        with pytest.raises(DomainError):
            tfidf_cosine_distance(vectors[0], vectors[0], idf)

    def test_tf_l2_anchor(self):
        vocab = Vocabulary(("a", "b"), padded=False)
        cfg = EmbeddingConfig(alpha=0.01)
        pa = embed_document(count_document(RawDocument("x", "l", "a"), vocab), vocab, cfg)
        pb = embed_document(count_document(RawDocument("y", "l", "b"), vocab), vocab, cfg)
        expected = math.sqrt(2.0) * abs(pa.coords[0] - pb.coords[0])
        assert math.isclose(tf_l2_distance(pa, pb), expected, rel_tol=1e-12)
        assert tf_l2_distance(pa, pa) == 0.0

    def test_tf_l2_dimension_mismatch(self):
        from simplexmetric import DimensionMismatchError, SimplexPoint

        with pytest.raises(DimensionMismatchError):
            tf_l2_distance(SimplexPoint.uniform(2), SimplexPoint.uniform(4))


class TestRankedExports:
    def test_descending_with_lexicographic_ties(self):
        vocab = Vocabulary(("a", "b", "c"), padded=False)
        rows = export_ranked_scores([2.0, 2.0, 5.0], vocab)
        assert rows == [(1, "c", 5.0), (2, "a", 2.0), (3, "b", 2.0)]

    def test_csv_format(self, tmp_path):
        vocab = Vocabulary(("x", "y"), padded=False)
        rows = export_ranked_scores([1.5, 0.25], vocab)
        path = tmp_path / "scores.csv"
        write_scores_csv(path, rows)
        lines = path.read_text().splitlines()
        assert lines[0] == "rank,term,score"
        assert lines[1] == "1,x,1.5"
        assert lines[2] == "2,y,0.25"

    def test_length_mismatch_rejected(self):
        from simplexmetric import DimensionMismatchError

        vocab = Vocabulary(("a", "b"), padded=False)
        with pytest.raises(DimensionMismatchError):
            export_ranked_scores([1.0], vocab)

    def test_nonfinite_scores_rejected(self):
        vocab = Vocabulary(("a", "b"), padded=False)
        with pytest.raises(DataError):
            export_ranked_scores([1.0, math.nan], vocab)


class TestLoaders:
    def make_tree(self, root):
        for label, name, text in [
            ("spam", "m2", "buy now"),
            ("spam", "m1", "free offer"),
            ("ham", "a1", "meeting at noon"),
        ]:
            d = root / label
            d.mkdir(exist_ok=True)
            (d / f"{name}.txt").write_text(text, encoding="utf-8")

    def test_directory_tree_sorted(self, tmp_path):
        self.make_tree(tmp_path)
        docs = load_corpus_dir(tmp_path)
        assert [(d.doc_id, d.label) for d in docs] == [
            ("a1", "ham"),
            ("m1", "spam"),
            ("m2", "spam"),
        ]
        assert docs[1].text == "free offer"

    def test_missing_directory(self, tmp_path):
        with pytest.raises(DataError):
            load_corpus_dir(tmp_path / "nope")

    def test_jsonl_round_trip(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        records = [
            {"id": "r1", "label": "a", "text": "one two"},
            {"id": "r2", "label": "b", "text": "three"},
        ]
        path.write_text("\n".join(json.dumps(r) for r in records) + "\n", encoding="utf-8")
        docs = load_corpus_jsonl(path)
        assert [(d.doc_id, d.label, d.text) for d in docs] == [
            ("r1", "a", "one two"),
            ("r2", "b", "three"),
        ]

    def test_jsonl_corrupt_line_names_line_number(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text(
            '{"id": "r1", "label": "a", "text": "fine"}\nnot json\n', encoding="utf-8"
        )
        with pytest.raises(CorpusFormatError, match="line 2"):
            load_corpus_jsonl(path)

    def test_jsonl_missing_field(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"id": "r1", "label": "a"}\n', encoding="utf-8")
        with pytest.raises(CorpusFormatError, match="line 1"):
            load_corpus_jsonl(path)

    def test_jsonl_non_string_field(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"id": 7, "label": "a", "text": "x"}\n', encoding="utf-8")
        with pytest.raises(CorpusFormatError):
            load_corpus_jsonl(path)

    def test_dispatch_by_format(self, tmp_path):
        self.make_tree(tmp_path)
        docs = load_corpus(tmp_path, fmt="dir")
        assert len(docs) == 3
        with pytest.raises(DataError):
            load_corpus(tmp_path, fmt="parquet")
