"""Maximum-likelihood estimation of the reweighting parameter.

The estimate maximizes the data log likelihood
k sum_j log(x_j . theta) - N log Ztilde(theta) over the open simplex of
parameters.  Updates are multiplicative (exponentiated gradient), which
keeps every iterate strictly positive and normalized, with backtracking
on the step size so the likelihood never decreases.  The learned metric
uses the group inverse of the estimate: the fitted transformation maps
the data toward uniform, and pulling the Fisher metric back through its
inverse makes that correction part of the geometry.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DataError, DimensionMismatchError, DomainError
from .geometry import MetricParam, SimplexPoint, invert_param
from .likelihood import PartitionEngine

# Iterates are floored here after each update; far below any weight the
# stability contract cares about, but it keeps the engine's positivity
# checks satisfied when a coordinate is driven hard toward zero.
_WEIGHT_FLOOR = 1e-300

# Exponent clip for the multiplicative update, just inside float64 range.
_EXP_FLOOR = -700.0

_MAX_HALVINGS = 60

__all__ = ["OptimizerConfig", "FitResult", "estimate_theta", "learned_metric_param"]


@dataclass(frozen=True)
class OptimizerConfig:
    """Knobs for the exponentiated-gradient ascent.

    ``step_size`` is the initial step; each iteration first tries twice
    the last accepted step, then backtracks by ``backtrack`` until the
    likelihood is nondecreasing.  Convergence is declared when an
    accepted step improves the likelihood by less than ``tolerance``
    relative to its magnitude.  ``seed`` is recorded for provenance; the
    ascent itself is deterministic.
    """

    step_size: float = 1.0
    backtrack: float = 0.5
    tolerance: float = 1e-6
    max_iterations: int = 500
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.step_size > 0.0:
            raise DomainError(f"step_size must be positive, got {self.step_size}")
        if not 0.0 < self.backtrack < 1.0:
            raise DomainError(f"backtrack must lie in (0, 1), got {self.backtrack}")
        if self.tolerance < 0.0:
            raise DomainError(f"tolerance must be nonnegative, got {self.tolerance}")
        if self.max_iterations < 1:
            raise DomainError(f"max_iterations must be >= 1, got {self.max_iterations}")


@dataclass(frozen=True)
class FitResult:
    """Outcome of a fit.

    ``theta_hat`` maximizes the likelihood; ``lambda_metric`` is its group
    inverse, the parameter of the learned metric.  ``trace`` holds the log
    likelihood at the start and after each accepted step, so it has
    ``iterations + 1`` entries and is nondecreasing.
    """

    theta_hat: MetricParam
    lambda_metric: MetricParam
    trace: tuple[float, ...]
    iterations: int
    converged: bool

    @property
    def final_loglikelihood(self) -> float:
        return self.trace[-1]


def _stack_points(points: Sequence[SimplexPoint]) -> np.ndarray:
    if len(points) == 0:
        raise DataError("estimate_theta needs at least one point")
    dim = points[0].dim
    for p in points:
        if p.dim != dim:
            raise DimensionMismatchError("points must share a dimension")
        if not p.interior:
            raise DomainError("estimate_theta requires interior points")
    return np.stack([p.coords for p in points])


def estimate_theta(
    points: Sequence[SimplexPoint], config: OptimizerConfig | None = None
) -> FitResult:
    """Fit the reweighting parameter to data by maximum likelihood.

    Starts at the uniform parameter.  Each iteration shifts the gradient
    by its maximum (the likelihood only depends on the parameter ray, so
    a constant shift is free and keeps the exponentials bounded by 1),
    scales multiplicatively, renormalizes, and backtracks until the
    likelihood does not decrease.  Stops early once no step of any tried
    size improves, or the improvement falls below tolerance.
    """
    cfg = config or OptimizerConfig()
    data = _stack_points(points)
    n_points, n_outcomes = data.shape
    engine = PartitionEngine(n_outcomes)
    k = engine.k

    def value(w: np.ndarray) -> float:
        dots = data @ w
        return k * float(np.log(dots).sum()) - n_points * engine.log_partition(w)

    def gradient(w: np.ndarray) -> np.ndarray:
        dots = data @ w
        return k * (data / dots[:, np.newaxis]).sum(axis=0) - n_points * engine.gradient(w)

    weights = np.full(n_outcomes, 1.0 / n_outcomes)
    current = value(weights)
    trace = [current]
    eta = cfg.step_size
    converged = False
    iterations = 0

    for _ in range(cfg.max_iterations):
        g = gradient(weights)
        g -= g.max()
        step = 2.0 * eta
        accepted = False
        for _ in range(_MAX_HALVINGS):
            cand = weights * np.exp(np.maximum(step * g, _EXP_FLOOR))
            cand /= cand.sum()
            np.maximum(cand, _WEIGHT_FLOOR, out=cand)
            cand /= cand.sum()
            cand_value = value(cand)
            if cand_value >= current:
                accepted = True
                break
            step *= cfg.backtrack
        if not accepted:
            converged = True
            break
        weights = cand
        eta = step
        iterations += 1
        trace.append(cand_value)
        improvement = cand_value - current
        current = cand_value
        if improvement <= cfg.tolerance * max(1.0, abs(current)):
            converged = True
            break

    theta_hat = MetricParam(weights)
    return FitResult(
        theta_hat=theta_hat,
        lambda_metric=invert_param(theta_hat),
        trace=tuple(trace),
        iterations=iterations,
        converged=converged,
    )


def learned_metric_param(fit: FitResult) -> MetricParam:
    """Parameter of the learned metric: the group inverse of the estimate."""
    return fit.lambda_metric
