"""Learned Riemannian metrics on the probability simplex.

The package learns a reweighting of the Fisher information metric by
maximum likelihood under an inverse-volume density model, computes the
resulting geodesic document distances in closed form, and benchmarks
them against TFIDF-cosine and plain Euclidean baselines in
nearest-neighbor text classification.
"""

from .corpus import (
    PAD_TERM,
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
    load_corpus,
    load_corpus_dir,
    load_corpus_jsonl,
    tf_l2_distance,
    tfidf_cosine_distance,
    tokenize,
    write_scores_csv,
)
from .errors import (
    CorpusFormatError,
    DataError,
    DimensionMismatchError,
    DomainError,
    NumericError,
    SimplexMetricError,
    UnsupportedDimensionError,
)
from .geometry import (
    GramMatrix,
    MetricParam,
    SimplexPoint,
    SpherePoint,
    TangentJacobian,
    apply_transform,
    compose_params,
    fisher_distance,
    geodesic_distance,
    gram_matrix,
    invert_param,
    log_volume_element,
    pushforward_jacobian,
    sphere_map,
    tangent_basis,
)
from .harness import (
    VALID_KINDS,
    DistanceKind,
    EmbeddedCorpus,
    EmbeddedDocument,
    ExperimentReport,
    ReportRow,
    ScoreComparison,
    distance_matrix,
    embed_corpus,
    nn_classify,
    run_experiment,
    score_comparison,
)
from .likelihood import (
    CoefficientSeries,
    ConvolutionTable,
    LogPartition,
    PartitionEngine,
    coefficient_series,
    convolve,
    log_density,
    log_partition,
    log_partition_bruteforce,
    log_partition_gradient,
    loglikelihood,
    partition_table,
)
from .optimize import FitResult, OptimizerConfig, estimate_theta, learned_metric_param
from .synthetic import SyntheticConfig, synthetic_two_class_corpus

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "SimplexMetricError",
    "DataError",
    "DimensionMismatchError",
    "CorpusFormatError",
    "NumericError",
    "DomainError",
    "UnsupportedDimensionError",
    # geometry
    "SimplexPoint",
    "MetricParam",
    "SpherePoint",
    "TangentJacobian",
    "GramMatrix",
    "fisher_distance",
    "apply_transform",
    "invert_param",
    "compose_params",
    "sphere_map",
    "geodesic_distance",
    "pushforward_jacobian",
    "gram_matrix",
    "log_volume_element",
    "tangent_basis",
    # likelihood
    "CoefficientSeries",
    "ConvolutionTable",
    "LogPartition",
    "PartitionEngine",
    "coefficient_series",
    "convolve",
    "log_partition",
    "log_partition_bruteforce",
    "log_partition_gradient",
    "partition_table",
    "log_density",
    "loglikelihood",
    # optimizer
    "OptimizerConfig",
    "FitResult",
    "estimate_theta",
    "learned_metric_param",
    # corpus
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
    # harness
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
    # synthetic
    "SyntheticConfig",
    "synthetic_two_class_corpus",
]
