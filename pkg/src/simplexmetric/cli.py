"""Command-line interface: learn a metric, measure distances, run evaluations.

Subcommands: ``learn`` fits the reweighting parameter to a corpus and
writes a JSON model file; ``dist`` prints the distance between two
documents under a chosen kind; ``eval`` runs the repeated-split
nearest-neighbor comparison and writes the report CSV; ``scores`` exports
the learned-weight and IDF term rankings with their overlap; ``bench-z``
times the partition function and its gradient; ``vocab`` prints the
vocabulary a corpus would produce.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
Every command is deterministic given its flags and seed; model files and
reports are byte-identical across reruns.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import (
    EmbeddingConfig,
    RawDocument,
    Vocabulary,
    build_vocabulary,
    count_document,
    embed_document,
    export_ranked_scores,
    idf_weights,
    load_corpus,
    tf_l2_distance,
    tfidf_cosine_distance,
    write_scores_csv,
)
from .errors import DataError, NumericError
from .geometry import MetricParam, fisher_distance, geodesic_distance
from .harness import VALID_KINDS, DistanceKind, run_experiment, score_comparison
from .likelihood import PartitionEngine
from .optimize import OptimizerConfig, estimate_theta

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3

MODEL_FORMAT_VERSION = 1

__all__ = [
    "EXIT_OK",
    "EXIT_USAGE",
    "EXIT_DATA",
    "EXIT_NUMERIC",
    "MODEL_FORMAT_VERSION",
    "ModelFile",
    "UsageError",
    "build_parser",
    "main",
]


class UsageError(Exception):
    """A problem with flags or arguments; maps to exit code 1."""


@dataclass(frozen=True)
class ModelFile:
    """Persisted fit: vocabulary, estimate, learned metric, fit metadata.

    Floats are serialized through JSON's shortest-round-trip decimal
    form, so writing and re-reading reproduces every coordinate
    bit for bit.  ``lambda_metric`` must be the group inverse of
    ``theta_hat`` within 1e-12; loading re-checks that invariant.
    """

    terms: tuple[str, ...]
    padded: bool
    alpha: float
    min_count: int
    theta_hat: tuple[float, ...]
    lambda_metric: tuple[float, ...]
    iterations: int
    final_loglikelihood: float
    converged: bool
    seed: int
    format_version: int = MODEL_FORMAT_VERSION

    def __post_init__(self) -> None:
        if self.format_version != MODEL_FORMAT_VERSION:
            raise DataError(
                f"unrecognized model format version {self.format_version}; "
                f"this build reads version {MODEL_FORMAT_VERSION}"
            )
        if not (len(self.terms) == len(self.theta_hat) == len(self.lambda_metric)):
            raise DataError("model terms, theta_hat, and lambda_metric lengths differ")
        theta = np.asarray(self.theta_hat, dtype=np.float64)
        lam = np.asarray(self.lambda_metric, dtype=np.float64)
        if np.any(theta <= 0.0) or np.any(lam <= 0.0):
            raise DataError("model parameters must be strictly positive")
        inverse = 1.0 / theta
        inverse /= inverse.sum()
        if float(np.max(np.abs(inverse - lam))) > 1e-12:
            raise DataError("model lambda_metric is not the inverse of theta_hat")

    def vocabulary(self) -> Vocabulary:
        return Vocabulary(terms=self.terms, padded=self.padded)

    def theta_param(self) -> MetricParam:
        return MetricParam(np.asarray(self.theta_hat))

    def metric_param(self) -> MetricParam:
        return MetricParam(np.asarray(self.lambda_metric))

    def to_json_text(self) -> str:
        payload = {
            "format_version": self.format_version,
            "terms": list(self.terms),
            "padded": self.padded,
            "alpha": self.alpha,
            "min_count": self.min_count,
            "theta_hat": list(self.theta_hat),
            "lambda_metric": list(self.lambda_metric),
            "fit": {
                "iterations": self.iterations,
                "final_loglikelihood": self.final_loglikelihood,
                "converged": self.converged,
                "seed": self.seed,
            },
        }
        return json.dumps(payload, sort_keys=True, indent=1) + "\n"

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json_text(), encoding="utf-8")

    @classmethod
    def from_json_text(cls, text: str, source: str = "<string>") -> "ModelFile":
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DataError(f"{source}: invalid JSON: {exc}")
        if not isinstance(payload, dict):
            raise DataError(f"{source}: model file must hold a JSON object")
        required = {
            "format_version",
            "terms",
            "padded",
            "alpha",
            "min_count",
            "theta_hat",
            "lambda_metric",
            "fit",
        }
        missing = sorted(required - payload.keys())
        if missing:
            raise DataError(f"{source}: model file missing fields {missing}")
        fit = payload["fit"]
        if not isinstance(fit, dict):
            raise DataError(f"{source}: model 'fit' must be an object")
        fit_missing = sorted(
            {"iterations", "final_loglikelihood", "converged", "seed"} - fit.keys()
        )
        if fit_missing:
            raise DataError(f"{source}: model 'fit' missing fields {fit_missing}")
        try:
            return cls(
                terms=tuple(str(t) for t in payload["terms"]),
                padded=bool(payload["padded"]),
                alpha=float(payload["alpha"]),
                min_count=int(payload["min_count"]),
                theta_hat=tuple(float(v) for v in payload["theta_hat"]),
                lambda_metric=tuple(float(v) for v in payload["lambda_metric"]),
                iterations=int(fit["iterations"]),
                final_loglikelihood=float(fit["final_loglikelihood"]),
                converged=bool(fit["converged"]),
                seed=int(fit["seed"]),
                format_version=int(payload["format_version"]),
            )
        except (TypeError, ValueError) as exc:
            raise DataError(f"{source}: malformed model field: {exc}")

    @classmethod
    def load(cls, path: str | Path) -> "ModelFile":
        source = Path(path)
        if not source.is_file():
            raise DataError(f"model file {source} does not exist")
        return cls.from_json_text(source.read_text(encoding="utf-8"), source=str(source))


class _CliParser(argparse.ArgumentParser):
    """argparse parser that reports usage problems via UsageError (exit 1)."""

    def error(self, message: str):
        raise UsageError(message)


def _parse_int_list(text: str, what: str, *, require_odd: bool = False) -> list[int]:
    values = []
    for piece in text.split(","):
        piece = piece.strip()
        if not piece:
            continue
        try:
            value = int(piece)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{what} must be integers, got {piece!r}")
        if value < 1:
            raise argparse.ArgumentTypeError(f"{what} must be positive, got {value}")
        if require_odd and value % 2 == 0:
            raise argparse.ArgumentTypeError(
                f"{what} must be odd (even point counts), got {value}"
            )
        values.append(value)
    if not values:
        raise argparse.ArgumentTypeError(f"{what} list is empty")
    return values


def _sizes_arg(text: str) -> list[int]:
    return _parse_int_list(text, "sizes")


def _dims_arg(text: str) -> list[int]:
    return _parse_int_list(text, "dimensions", require_odd=True)


def _kinds_arg(text: str) -> list[str]:
    names = [piece.strip() for piece in text.split(",") if piece.strip()]
    if not names:
        raise argparse.ArgumentTypeError("kinds list is empty")
    for name in names:
        if name not in VALID_KINDS:
            raise argparse.ArgumentTypeError(
                f"unknown kind {name!r}; expected one of {', '.join(VALID_KINDS)}"
            )
    return names


def _add_corpus_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--corpus", required=True, help="corpus path")
    parser.add_argument(
        "--format",
        choices=("dir", "jsonl"),
        default="dir",
        help="corpus layout: directory tree root/<label>/<docid>.txt or JSON lines",
    )


def _add_embedding_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--alpha", type=float, default=0.01, help="embedding smoothing (default 0.01)"
    )
    parser.add_argument(
        "--min-count",
        type=int,
        default=1,
        dest="min_count",
        help="drop terms with total corpus count below this (default 1)",
    )


def _add_optimizer_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--step-size", type=float, default=1.0, dest="step_size",
        help="initial exponentiated-gradient step (default 1.0)",
    )
    parser.add_argument(
        "--tol", type=float, default=1e-6,
        help="relative improvement below which the fit stops (default 1e-6)",
    )
    parser.add_argument(
        "--max-iter", type=int, default=500, dest="max_iter",
        help="maximum accepted steps (default 500)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _CliParser(
        prog="simplexmetric",
        description="Learned simplex metrics for document distances.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_CliParser)

    learn = sub.add_parser("learn", help="fit the reweighting parameter to a corpus")
    _add_corpus_flags(learn)
    _add_embedding_flags(learn)
    _add_optimizer_flags(learn)
    learn.add_argument("--seed", type=int, default=0, help="recorded provenance seed")
    learn.add_argument("--out", required=True, help="model JSON output path")
    learn.set_defaults(func=cmd_learn)

    dist = sub.add_parser("dist", help="distance between two document files")
    dist.add_argument("--model", required=True, help="model JSON from 'learn'")
    dist.add_argument(
        "--kind", choices=VALID_KINDS, default="learned_geodesic",
        help="distance to print (default learned_geodesic)",
    )
    dist.add_argument(
        "--corpus", help="corpus for document frequencies (tfidf_cosine only)"
    )
    dist.add_argument("--format", choices=("dir", "jsonl"), default="dir")
    dist.add_argument("doc_a", help="text file of the first document")
    dist.add_argument("doc_b", help="text file of the second document")
    dist.set_defaults(func=cmd_dist)

    evaluate = sub.add_parser("eval", help="repeated-split nearest-neighbor comparison")
    _add_corpus_flags(evaluate)
    _add_embedding_flags(evaluate)
    _add_optimizer_flags(evaluate)
    evaluate.add_argument("--sizes", type=_sizes_arg, default=[20, 40, 80])
    evaluate.add_argument("--repeats", type=int, default=20)
    evaluate.add_argument("--seed", type=int, default=0)
    evaluate.add_argument(
        "--kinds", type=_kinds_arg, default=list(VALID_KINDS),
        help=f"comma-separated subset of {', '.join(VALID_KINDS)}",
    )
    evaluate.add_argument(
        "--model",
        help="model JSON whose metric is used as-is (skips per-split fitting)",
    )
    evaluate.add_argument("--out", required=True, help="report CSV output path")
    evaluate.add_argument("--json", dest="json_out", help="optional JSON report mirror")
    evaluate.set_defaults(func=cmd_eval)

    scores = sub.add_parser("scores", help="export learned-weight and IDF rankings")
    scores.add_argument("--model", required=True)
    _add_corpus_flags(scores)
    scores.add_argument("--top-k", type=int, default=20, dest="top_k")
    scores.add_argument("--out-dir", required=True, dest="out_dir")
    scores.set_defaults(func=cmd_scores)

    bench = sub.add_parser("bench-z", help="time the partition function and gradient")
    bench.add_argument(
        "--n", type=_dims_arg, default=[127, 511],
        help="comma-separated odd dimensions n (point size n+1), default 127,511",
    )
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--trials", type=int, default=3, help="best-of timing trials")
    bench.add_argument("--out", help="CSV output path (default stdout)")
    bench.set_defaults(func=cmd_bench_z)

    vocab = sub.add_parser("vocab", help="print the vocabulary a corpus produces")
    _add_corpus_flags(vocab)
    vocab.add_argument("--min-count", type=int, default=1, dest="min_count")
    vocab.add_argument(
        "--pad", action=argparse.BooleanOptionalAction, default=True,
        help="pad to an even size with a dummy term (default on)",
    )
    vocab.add_argument("--out", help="write terms here instead of stdout")
    vocab.set_defaults(func=cmd_vocab)

    return parser


def _embed_corpus_points(docs, vocab, config):
    vectors = [count_document(doc, vocab) for doc in docs]
    points = [embed_document(vec, vocab, config) for vec in vectors]
    return vectors, points


def cmd_learn(args: argparse.Namespace) -> int:
    docs = load_corpus(args.corpus, args.format)
    vocab = build_vocabulary(docs, min_count=args.min_count, pad=True)
    config = EmbeddingConfig(args.alpha)
    _, points = _embed_corpus_points(docs, vocab, config)
    fit = estimate_theta(
        points,
        OptimizerConfig(
            step_size=args.step_size,
            tolerance=args.tol,
            max_iterations=args.max_iter,
            seed=args.seed,
        ),
    )
    model = ModelFile(
        terms=vocab.terms,
        padded=vocab.padded,
        alpha=args.alpha,
        min_count=args.min_count,
        theta_hat=tuple(float(v) for v in fit.theta_hat.weights),
        lambda_metric=tuple(float(v) for v in fit.lambda_metric.weights),
        iterations=fit.iterations,
        final_loglikelihood=fit.final_loglikelihood,
        converged=fit.converged,
        seed=args.seed,
    )
    model.save(args.out)
    print(f"documents={len(docs)} vocabulary={vocab.size} padded={vocab.padded}")
    print(
        f"loglikelihood={fit.final_loglikelihood!r} iterations={fit.iterations} "
        f"converged={fit.converged}"
    )
    print(f"wrote {args.out}")
    return EXIT_OK


def _read_document(path: str) -> RawDocument:
    source = Path(path)
    if not source.is_file():
        raise DataError(f"document file {source} does not exist")
    return RawDocument(doc_id=source.stem, label="", text=source.read_text(encoding="utf-8"))


def cmd_dist(args: argparse.Namespace) -> int:
    model = ModelFile.load(args.model)
    vocab = model.vocabulary()
    config = EmbeddingConfig(model.alpha)
    vec_a = count_document(_read_document(args.doc_a), vocab)
    vec_b = count_document(_read_document(args.doc_b), vocab)
    point_a = embed_document(vec_a, vocab, config)
    point_b = embed_document(vec_b, vocab, config)
    if args.kind == "learned_geodesic":
        value = geodesic_distance(model.metric_param(), point_a, point_b)
    elif args.kind == "fisher":
        value = fisher_distance(point_a, point_b)
    elif args.kind == "tf_l2":
        value = tf_l2_distance(point_a, point_b)
    else:
        if not args.corpus:
            raise UsageError("tfidf_cosine needs --corpus to derive document frequencies")
        docs = load_corpus(args.corpus, args.format)
        vectors = [count_document(doc, vocab) for doc in docs]
        idf = idf_weights(vectors, vocab)
        value = tfidf_cosine_distance(vec_a, vec_b, idf)
    print(f"{value:.12g}")
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    docs = load_corpus(args.corpus, args.format)
    fixed_metric = None
    alpha = args.alpha
    min_count = args.min_count
    if args.model:
        model = ModelFile.load(args.model)
        vocab = build_vocabulary(docs, min_count=model.min_count, pad=True)
        if vocab.terms != model.terms:
            raise DataError(
                "model vocabulary does not match this corpus; "
                "refit or evaluate on the corpus the model came from"
            )
        fixed_metric = model.metric_param()
        alpha = model.alpha
        min_count = model.min_count
    kinds = [DistanceKind(name) for name in args.kinds]
    report = run_experiment(
        docs,
        sizes=args.sizes,
        repeats=args.repeats,
        seed=args.seed,
        kinds=kinds,
        min_count=min_count,
        alpha=alpha,
        optimizer=OptimizerConfig(
            step_size=args.step_size,
            tolerance=args.tol,
            max_iterations=args.max_iter,
            seed=args.seed,
        ),
        fixed_metric=fixed_metric,
    )
    report.to_csv(args.out)
    if args.json_out:
        report.to_json(args.json_out)
    print("size kind mean_error std_error")
    for row in report.rows:
        print(f"{row.size} {row.kind} {row.mean_error:.4f} {row.std_error:.4f}")
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_scores(args: argparse.Namespace) -> int:
    model = ModelFile.load(args.model)
    vocab = model.vocabulary()
    docs = load_corpus(args.corpus, args.format)
    vectors = [count_document(doc, vocab) for doc in docs]
    idf = idf_weights(vectors, vocab)
    comparison = score_comparison(model.metric_param(), idf, vocab, top_k=args.top_k)

    lam_rows = export_ranked_scores(model.metric_param().weights, vocab)
    idf_rows = export_ranked_scores(idf.values, vocab)
    if vocab.padded:
        dummy = vocab.terms[-1]
        lam_rows = [(r, t, s) for r, t, s in lam_rows if t != dummy]
        idf_rows = [(r, t, s) for r, t, s in idf_rows if t != dummy]
        lam_rows = [(i, t, s) for i, (_, t, s) in enumerate(lam_rows, 1)]
        idf_rows = [(i, t, s) for i, (_, t, s) in enumerate(idf_rows, 1)]
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_scores_csv(out_dir / "lambda_scores.csv", lam_rows)
    write_scores_csv(out_dir / "idf_scores.csv", idf_rows)
    (out_dir / "overlap.json").write_text(
        json.dumps(comparison.as_dict(), sort_keys=True, indent=1) + "\n",
        encoding="utf-8",
    )
    print(
        f"jaccard_top={comparison.jaccard_top!r} "
        f"jaccard_bottom={comparison.jaccard_bottom!r}"
    )
    print(f"wrote {out_dir}/lambda_scores.csv, idf_scores.csv, overlap.json")
    return EXIT_OK


def cmd_bench_z(args: argparse.Namespace) -> int:
    if args.trials < 1:
        raise UsageError(f"--trials must be >= 1, got {args.trials}")
    lines = ["n,partition_ms,gradient_ms"]
    for n in args.n:
        n_outcomes = n + 1
        rng = np.random.default_rng(args.seed)
        weights = rng.dirichlet(np.ones(n_outcomes))
        engine = PartitionEngine(n_outcomes)
        partition_ms = float("inf")
        gradient_ms = float("inf")
        for _ in range(args.trials):
            start = time.perf_counter()
            value = engine.log_partition(weights)
            partition_ms = min(partition_ms, (time.perf_counter() - start) * 1e3)
            if not np.isfinite(value):
                raise NumericError(f"log partition not finite at n={n}")
            start = time.perf_counter()
            grad = engine.gradient(weights)
            gradient_ms = min(gradient_ms, (time.perf_counter() - start) * 1e3)
            if not np.all(np.isfinite(grad)):
                raise NumericError(f"gradient not finite at n={n}")
        lines.append(f"{n},{partition_ms!r},{gradient_ms!r}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_vocab(args: argparse.Namespace) -> int:
    docs = load_corpus(args.corpus, args.format)
    vocab = build_vocabulary(docs, min_count=args.min_count, pad=args.pad)
    text = "\n".join(vocab.terms) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    print(f"terms={vocab.size} padded={vocab.padded}", file=sys.stderr)
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help and friends
        code = exc.code
        return 0 if code is None else int(code)
    try:
        return int(args.func(args))
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
