"""Normalizing constant and likelihood of the inverse-volume density family.

The model assigns a simplex point x the unnormalized density
(x . lambda)^k * prod_i sqrt(x_i) with k = (n + 1) / 2, the reciprocal of
the volume element of the reweighting metric up to lambda-only factors.
Integrating over the simplex reduces, for odd n, to the polynomial

    Ztilde(lambda) = sum_{|a| = k} prod_j c_{a_j} lambda_j^{a_j},
    c_m = Gamma(m + 3/2) / Gamma(m + 1),

a sum over weak compositions a of k into n + 1 parts.  This module
evaluates log Ztilde, its gradient in lambda, the normalized log density,
and the data log likelihood.

The polynomial is a product of n + 1 univariate series, so the evaluation
is a chain of truncated convolutions.  Two devices keep it finite in
float64 at large n: every row and partial product is rescaled by its
maximum (tracking log offsets), and the whole product is exponentially
tilted, replacing lambda_j^m by (lambda_j t)^m with t chosen so the
expected total degree is k.  The tilt moves the mass of the final row onto
the needed degree-k coefficient; it is exact, contributing a known
-k log t correction.  Without it the degree-k entry can sit thousands of
log units below the row maximum and underflow, even with per-row
rescaling.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DataError,
    DimensionMismatchError,
    DomainError,
    NumericError,
    UnsupportedDimensionError,
)
from .geometry import MetricParam, SimplexPoint

# Output length below which plain convolution beats the FFT route.
FFT_MIN_LENGTH = 64

# Refuse brute-force enumeration beyond this many compositions.
BRUTEFORCE_TERM_LIMIT = 10**6

# Width, in log t, at which the tilt bisection stops.  The mass of the
# final row then peaks within a few log units of degree k, far inside
# float64 range.
_TILT_WIDTH = 1e-3

__all__ = [
    "FFT_MIN_LENGTH",
    "BRUTEFORCE_TERM_LIMIT",
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
]


@dataclass(frozen=True)
class CoefficientSeries:
    """Coefficients c_m = Gamma(m + 3/2) / Gamma(m + 1), m = 0..k, rescaled.

    ``values`` holds c_m / max_m c_m so the largest entry is exactly 1;
    ``log_offset`` is log(max_m c_m), making the true logs recoverable as
    log(values) + log_offset without overflow at any k.
    """

    k: int
    values: np.ndarray
    log_offset: float

    def log_values(self) -> np.ndarray:
        """True log c_m for m = 0..k."""
        return np.log(self.values) + self.log_offset

    def coefficient(self, m: int) -> float:
        """True c_m."""
        return float(self.values[m] * math.exp(self.log_offset))


def coefficient_series(k: int) -> CoefficientSeries:
    """Series coefficients of one univariate factor, truncated at degree k.

    The ratio c_{m+1} / c_m = (m + 3/2) / (m + 1) exceeds 1, so the
    maximum is c_k and the rescaled values are nondecreasing.
    """
    if k < 0:
        raise DomainError(f"series order must be nonnegative, got {k}")
    log_c = np.array(
        [math.lgamma(m + 1.5) - math.lgamma(m + 1.0) for m in range(k + 1)]
    )
    offset = float(log_c[-1])
    values = np.exp(log_c - offset)
    values.flags.writeable = False
    return CoefficientSeries(k=k, values=values, log_offset=offset)


def convolve(
    a: np.ndarray,
    b: np.ndarray,
    mode: str = "auto",
    length: int | None = None,
) -> np.ndarray:
    """Linear convolution of two 1-D sequences, optionally truncated.

    ``mode`` selects the route: "direct" sums products, "fft" multiplies
    real FFTs (identical up to roundoff), "auto" picks FFT once the full
    output length reaches ``FFT_MIN_LENGTH``.  When ``length`` is given the
    result is truncated (or zero-padded) to that length; truncation is
    exact because entry j only involves entries up to j of each input.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 1 or b.ndim != 1 or a.size == 0 or b.size == 0:
        raise DomainError("convolve expects nonempty 1-D sequences")
    if length is not None and length < 1:
        raise DomainError(f"convolve length must be positive, got {length}")
    full = a.size + b.size - 1
    if mode == "auto":
        mode = "fft" if full >= FFT_MIN_LENGTH else "direct"
    if mode == "direct":
        out = np.convolve(a, b)
    elif mode == "fft":
        nfft = 1
        while nfft < full:
            nfft *= 2
        out = np.fft.irfft(np.fft.rfft(a, nfft) * np.fft.rfft(b, nfft), nfft)[:full]
    else:
        raise DomainError(f"unknown convolve mode {mode!r}")
    if length is None or length == full:
        return out
    if length < full:
        return out[:length]
    padded = np.zeros(length)
    padded[:full] = out
    return padded


@dataclass(frozen=True)
class LogPartition:
    """Value of log Ztilde(lambda) together with the dimensions it was computed at."""

    value: float
    n: int
    k: int


@dataclass(frozen=True)
class ConvolutionTable:
    """Suffix products of the per-coordinate series, in tilted rescaled form.

    Row i - 1 (coordinate i, 1-based) stores the coefficients of the
    product of series i..n+1, truncated at degree k, after tilting degree
    m by exp(m * log_tilt) and rescaling the row to maximum 1.  The true
    untilted coefficient of degree j in row i is

        rows[i-1, j] * exp(log_scales[i-1] - j * log_tilt).

    Row 0 carries the full product; its degree-k entry is Ztilde.
    """

    rows: np.ndarray
    log_scales: np.ndarray
    log_tilt: float
    k: int

    def log_value(self, coord: int, degree: int) -> float:
        """True log coefficient of ``degree`` in the suffix product from ``coord``."""
        if not 1 <= coord <= self.rows.shape[0]:
            raise DomainError(f"coordinate index {coord} out of range")
        if not 0 <= degree <= self.k:
            raise DomainError(f"degree {degree} out of range")
        entry = float(self.rows[coord - 1, degree])
        if entry <= 0.0:
            return -math.inf
        return math.log(entry) + float(self.log_scales[coord - 1]) - degree * self.log_tilt


class PartitionEngine:
    """Reusable workspace for log Ztilde and its gradient at a fixed size.

    Construction precomputes the coefficient series; each evaluation
    solves for the tilt and folds the convolution chain.  The solved tilt
    is kept as a warm start, which speeds up the many nearby evaluations
    an optimizer makes.  Results do not depend on the warm start beyond
    roundoff.
    """

    def __init__(self, n_outcomes: int):
        if n_outcomes < 2 or n_outcomes % 2 != 0:
            raise UnsupportedDimensionError(
                f"partition function needs an even number of outcomes >= 2, "
                f"got {n_outcomes}; pad with a dummy coordinate"
            )
        self.n_outcomes = n_outcomes
        self.k = n_outcomes // 2
        self.series = coefficient_series(self.k)
        self._log_c = self.series.log_values()
        self._degrees = np.arange(self.k + 1, dtype=np.float64)
        self._theta_hint: float | None = None

    # -- input handling -------------------------------------------------

    def _check_weights(self, weights: np.ndarray) -> np.ndarray:
        w = np.asarray(weights, dtype=np.float64)
        if w.ndim != 1 or w.size != self.n_outcomes:
            raise DimensionMismatchError(
                f"expected {self.n_outcomes} weights, got shape {w.shape}"
            )
        if not np.all(np.isfinite(w)) or np.any(w <= 0.0):
            raise DomainError("weights must be finite and strictly positive")
        return w

    # -- tilt selection --------------------------------------------------

    def _mean_degree(self, log_lams: np.ndarray, theta: float) -> float:
        """Expected total degree when row i weights degree m by c_m (lambda_i e^theta)^m."""
        m = self._degrees
        k = self.k
        total = 0.0
        chunk = max(1, (1 << 22) // (k + 1))
        for start in range(0, log_lams.size, chunk):
            block = log_lams[start : start + chunk]
            logw = self._log_c[np.newaxis, :] + (block[:, np.newaxis] + theta) * m
            logw -= logw.max(axis=1, keepdims=True)
            w = np.exp(logw)
            total += float(((w @ m) / w.sum(axis=1)).sum())
        return total

    def _solve_theta(self, log_lams: np.ndarray) -> float:
        """Root of mean_degree(theta) = k; monotone, bracketed by doubling."""
        k = float(self.k)
        theta = self._theta_hint
        if theta is None:
            theta = -float(log_lams.max())
        f = self._mean_degree(log_lams, theta) - k
        step = 1.0
        lo = hi = theta
        if f <= 0.0:
            for _ in range(200):
                hi = hi + step
                if self._mean_degree(log_lams, hi) - k > 0.0:
                    break
                lo = hi
                step *= 2.0
            else:
                raise NumericError("tilt bracketing failed upward")
        else:
            for _ in range(200):
                lo = lo - step
                if self._mean_degree(log_lams, lo) - k <= 0.0:
                    break
                hi = lo
                step *= 2.0
            else:
                raise NumericError("tilt bracketing failed downward")
        while hi - lo > _TILT_WIDTH:
            mid = 0.5 * (lo + hi)
            if self._mean_degree(log_lams, mid) - k <= 0.0:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    def _scaled_row(self, log_lam: float, theta: float) -> tuple[np.ndarray, float]:
        """One tilted series, rescaled to maximum 1, with its log offset."""
        s = self._log_c + self._degrees * (log_lam + theta)
        smax = float(s.max())
        return np.exp(s - smax), smax

    # -- evaluations -----------------------------------------------------

    def _fold(
        self, log_lams: np.ndarray, theta: float, keep_rows: bool
    ) -> tuple[float, np.ndarray | None, np.ndarray | None]:
        """Fold the suffix convolution chain; return (log Ztilde, rows, scales)."""
        k = self.k
        n1 = self.n_outcomes
        rows = np.empty((n1, k + 1)) if keep_rows else None
        scales = np.empty(n1) if keep_rows else None
        cur: np.ndarray | None = None
        cur_scale = 0.0
        for i in range(n1 - 1, -1, -1):
            row, offset = self._scaled_row(float(log_lams[i]), theta)
            if cur is None:
                cur = row
                cur_scale = offset
            else:
                conv = convolve(row, cur, length=k + 1)
                np.maximum(conv, 0.0, out=conv)
                cmax = float(conv.max())
                if not (cmax > 0.0 and math.isfinite(cmax)):
                    raise NumericError("partition table row degenerated")
                cur = conv / cmax
                cur_scale += offset + math.log(cmax)
            if keep_rows:
                rows[i] = cur
                scales[i] = cur_scale
        assert cur is not None
        target = float(cur[k])
        if target <= 0.0:
            raise NumericError("degree-k coefficient underflowed")
        log_value = math.log(target) + cur_scale - k * theta
        return log_value, rows, scales

    def log_partition(self, weights: np.ndarray) -> float:
        """log Ztilde at the given positive weights (any normalization)."""
        w = self._check_weights(weights)
        log_lams = np.log(w)
        theta = self._solve_theta(log_lams)
        self._theta_hint = theta
        value, _, _ = self._fold(log_lams, theta, keep_rows=False)
        return value

    def table(self, weights: np.ndarray) -> ConvolutionTable:
        """Full suffix-product table, for inspection and tests."""
        w = self._check_weights(weights)
        log_lams = np.log(w)
        theta = self._solve_theta(log_lams)
        self._theta_hint = theta
        _, rows, scales = self._fold(log_lams, theta, keep_rows=True)
        assert rows is not None and scales is not None
        rows.flags.writeable = False
        scales.flags.writeable = False
        return ConvolutionTable(rows=rows, log_scales=scales, log_tilt=theta, k=self.k)

    def gradient(self, weights: np.ndarray) -> np.ndarray:
        """Gradient of log Ztilde in the weights.

        Coordinate i needs the product of every series but the i-th,
        assembled from prefix and suffix partial products, then convolved
        with the degree-weighted series of coordinate i.  All three
        factors are length k + 1, so one circular FFT of length > 2k
        recovers the needed degree-k coefficient for all coordinates in
        a few batched transforms.
        """
        w = self._check_weights(weights)
        k = self.k
        n1 = self.n_outcomes
        log_lams = np.log(w)
        theta = self._solve_theta(log_lams)
        self._theta_hint = theta

        rows = np.empty((n1, k + 1))
        offsets = np.empty(n1)
        for i in range(n1):
            rows[i], offsets[i] = self._scaled_row(float(log_lams[i]), theta)

        delta = np.zeros(k + 1)
        delta[0] = 1.0

        # prefix[j] is the rescaled product of series 1..j, prefix[0] the identity
        prefix = np.empty((n1 + 1, k + 1))
        prefix_scale = np.empty(n1 + 1)
        prefix[0] = delta
        prefix_scale[0] = 0.0
        for i in range(1, n1 + 1):
            conv = convolve(prefix[i - 1], rows[i - 1], length=k + 1)
            np.maximum(conv, 0.0, out=conv)
            cmax = float(conv.max())
            if not (cmax > 0.0 and math.isfinite(cmax)):
                raise NumericError("prefix product degenerated")
            prefix[i] = conv / cmax
            prefix_scale[i] = prefix_scale[i - 1] + offsets[i - 1] + math.log(cmax)

        # suffix[j] is the rescaled product of series j..n+1, suffix[n1 + 1] the identity
        suffix = np.empty((n1 + 2, k + 1))
        suffix_scale = np.empty(n1 + 2)
        suffix[n1 + 1] = delta
        suffix_scale[n1 + 1] = 0.0
        for i in range(n1, 0, -1):
            conv = convolve(rows[i - 1], suffix[i + 1], length=k + 1)
            np.maximum(conv, 0.0, out=conv)
            cmax = float(conv.max())
            if not (cmax > 0.0 and math.isfinite(cmax)):
                raise NumericError("suffix product degenerated")
            suffix[i] = conv / cmax
            suffix_scale[i] = suffix_scale[i + 1] + offsets[i - 1] + math.log(cmax)

        target = float(prefix[n1][k])
        if target <= 0.0:
            raise NumericError("degree-k coefficient underflowed")
        log_total = math.log(target) + prefix_scale[n1]

        # triple products ((m * row_i) . prefix_{i-1} . suffix_{i+1})[k], batched;
        # circular length > 2k cannot alias: total degree never exceeds 3k
        nfft = 1
        while nfft <= 2 * k:
            nfft *= 2
        weighted = rows * self._degrees[np.newaxis, :]
        numerator = np.empty(n1)
        chunk = max(1, (1 << 21) // nfft)
        for start in range(0, n1, chunk):
            stop = min(n1, start + chunk)
            freq = np.fft.rfft(weighted[start:stop], nfft, axis=1)
            freq *= np.fft.rfft(prefix[start:stop], nfft, axis=1)
            freq *= np.fft.rfft(suffix[start + 2 : stop + 2], nfft, axis=1)
            numerator[start:stop] = np.fft.irfft(freq, nfft, axis=1)[:, k]
        np.maximum(numerator, 0.0, out=numerator)

        with np.errstate(divide="ignore"):
            log_num = np.log(numerator)
        log_grad = (
            log_num
            + offsets
            + prefix_scale[:n1]
            + suffix_scale[2 : n1 + 2]
            - log_total
            - log_lams
        )
        return np.exp(log_grad)


def log_partition(param: MetricParam) -> LogPartition:
    """log Ztilde(lambda) for a metric parameter with an even number of outcomes."""
    engine = PartitionEngine(param.weights.size)
    return LogPartition(value=engine.log_partition(param.weights), n=param.dim, k=engine.k)


def partition_table(param: MetricParam) -> ConvolutionTable:
    """The suffix-product table behind ``log_partition``, for inspection."""
    return PartitionEngine(param.weights.size).table(param.weights)


def log_partition_gradient(param: MetricParam) -> np.ndarray:
    """Gradient of log Ztilde in the weights, as an unconstrained partial derivative.

    By homogeneity of degree k, weights . gradient equals k exactly.
    """
    return PartitionEngine(param.weights.size).gradient(param.weights)


def _weak_compositions(total: int, parts: int):
    """All length-``parts`` tuples of nonnegative ints summing to ``total``."""
    for cuts in itertools.combinations(range(total + parts - 1), parts - 1):
        comp = []
        prev = -1
        for c in cuts:
            comp.append(c - prev - 1)
            prev = c
        comp.append(total + parts - 1 - prev - 1)
        yield comp


def log_partition_bruteforce(
    param: MetricParam, term_limit: int = BRUTEFORCE_TERM_LIMIT
) -> float:
    """log Ztilde by enumerating every weak composition; an oracle for small sizes.

    Terms are accumulated with compensated summation after factoring out
    the largest log term.  Raises when the composition count exceeds
    ``term_limit``.
    """
    n1 = param.weights.size
    if n1 < 2 or n1 % 2 != 0:
        raise UnsupportedDimensionError(
            f"partition function needs an even number of outcomes >= 2, got {n1}"
        )
    k = n1 // 2
    count = math.comb(k + n1 - 1, n1 - 1)
    if count > term_limit:
        raise DomainError(
            f"brute force would enumerate {count} terms, above the limit {term_limit}"
        )
    log_c = coefficient_series(k).log_values()
    log_lams = np.log(param.weights)
    log_terms = [
        sum(log_c[a] + a * log_lams[j] for j, a in enumerate(comp))
        for comp in _weak_compositions(k, n1)
    ]
    top = max(log_terms)
    return top + math.log(math.fsum(math.exp(t - top) for t in log_terms))


def log_density(param: MetricParam, x: SimplexPoint) -> float:
    """Normalized log density of the inverse-volume model at an interior point.

    log p(x) = k log(x . lambda) + (1/2) sum_i log x_i - log Z, where
    log Z = log Ztilde + log Gamma(k + 1) - log Gamma(k + 3 (n + 1) / 2)
    accounts for the simplex integral of the monomials.
    """
    if param.dim != x.dim:
        raise DimensionMismatchError(f"dimension mismatch: {param.dim} vs {x.dim}")
    if not x.interior:
        raise DomainError("log density requires an interior point")
    engine = PartitionEngine(param.weights.size)
    k = engine.k
    n1 = param.weights.size
    log_norm = (
        engine.log_partition(param.weights)
        + math.lgamma(k + 1.0)
        - math.lgamma(k + 1.5 * n1)
    )
    dot = float(x.coords @ param.weights)
    return k * math.log(dot) + 0.5 * float(np.log(x.coords).sum()) - log_norm


def loglikelihood(param: MetricParam, points: Sequence[SimplexPoint]) -> float:
    """Data log likelihood up to data-only terms: k sum_j log(x_j . lambda) - N log Ztilde."""
    if len(points) == 0:
        raise DataError("loglikelihood needs at least one point")
    for p in points:
        if p.dim != param.dim:
            raise DimensionMismatchError(f"dimension mismatch: {param.dim} vs {p.dim}")
        if not p.interior:
            raise DomainError("loglikelihood requires interior points")
    engine = PartitionEngine(param.weights.size)
    data = np.stack([p.coords for p in points])
    dots = data @ param.weights
    return engine.k * float(np.log(dots).sum()) - len(points) * engine.log_partition(
        param.weights
    )
