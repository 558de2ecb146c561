"""Exception hierarchy shared across the package.

Two branches matter to callers: ``DataError`` for malformed or unusable
input (corpora, documents, model files, mismatched operands) and
``NumericError`` for computations that leave their supported domain.
The command-line layer maps the branches to distinct exit codes.
"""

from __future__ import annotations


class SimplexMetricError(Exception):
    """Base class for every error raised by this package."""


class DataError(SimplexMetricError):
    """Input data is malformed or unusable."""


class DimensionMismatchError(DataError):
    """Operands that must share a dimension do not."""


class CorpusFormatError(DataError):
    """A corpus file or directory does not follow the expected layout."""


class NumericError(SimplexMetricError):
    """A numeric computation failed or left its supported domain."""


class DomainError(NumericError):
    """An input lies outside the mathematical domain of an operation."""


class UnsupportedDimensionError(NumericError):
    """The operation requires an even number of outcomes.

    The normalizing-constant series is only closed form when the simplex
    dimension n is odd, i.e. n + 1 outcomes is even.  Pad the vocabulary
    with a dummy term to reach an even size.
    """
