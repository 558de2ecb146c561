"""Information geometry of the multinomial simplex under multiplicative reweightings.

The open simplex of probability vectors carries the Fisher information
metric, which the square-root map turns into the round metric on the
positive orthant of a sphere: distances come out as arc cosines of Bhattacharyya
coefficients.  A positive weight vector lambda acts on the simplex by
componentwise reweighting followed by renormalization, and pulling the
Fisher metric back through that action gives a family of metrics indexed
by lambda.  This module provides the point/parameter types, the group
operations of the reweighting action, the closed-form geodesic distances,
and the Jacobian, Gram matrix, and volume element of the associated
sphere embedding.

Conventions: a point has n + 1 nonnegative coordinates summing to one
(dimension n), a parameter is strictly positive with the same
normalization, and distances use the unit sphere, so values lie in
[0, pi/2].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, DomainError

# Tolerance on the coordinate sum before a vector is rejected rather
# than silently renormalized.
SUM_TOL = 1e-9

__all__ = [
    "SUM_TOL",
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
]


def _clean_coords(values, *, what: str, positive: bool) -> np.ndarray:
    arr = np.array(values, dtype=np.float64).reshape(-1)
    if arr.size < 2:
        raise DomainError(f"{what} needs at least two coordinates, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{what} coordinates must be finite")
    if positive:
        if np.any(arr <= 0.0):
            raise DomainError(f"{what} coordinates must be strictly positive")
    elif np.any(arr < 0.0):
        raise DomainError(f"{what} coordinates must be nonnegative")
    total = float(arr.sum())
    if abs(total - 1.0) > SUM_TOL:
        raise DomainError(f"{what} coordinates must sum to 1, got {total!r}")
    arr /= total
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class SimplexPoint:
    """A probability vector: n + 1 nonnegative coordinates summing to one.

    Sums within ``SUM_TOL`` of one are renormalized; anything farther off
    is rejected.  Coordinates are stored read-only.
    """

    coords: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "coords", _clean_coords(self.coords, what="simplex point", positive=False)
        )

    @property
    def dim(self) -> int:
        """Simplex dimension n (one less than the number of coordinates)."""
        return self.coords.size - 1

    @property
    def interior(self) -> bool:
        """True when every coordinate is strictly positive."""
        return bool(np.all(self.coords > 0.0))

    @classmethod
    def uniform(cls, n_outcomes: int) -> "SimplexPoint":
        return cls(np.full(n_outcomes, 1.0 / n_outcomes))


@dataclass(frozen=True)
class MetricParam:
    """A reweighting parameter: strictly positive coordinates summing to one.

    The normalization is a choice of representative; the action on the
    simplex only depends on the ray through lambda.
    """

    weights: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "weights", _clean_coords(self.weights, what="metric parameter", positive=True)
        )

    @property
    def dim(self) -> int:
        return self.weights.size - 1

    @classmethod
    def uniform(cls, n_outcomes: int) -> "MetricParam":
        return cls(np.full(n_outcomes, 1.0 / n_outcomes))


@dataclass(frozen=True)
class SpherePoint:
    """A point on the nonnegative orthant of the unit sphere."""

    coords: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.coords, dtype=np.float64).reshape(-1)
        if arr.size < 2 or not np.all(np.isfinite(arr)):
            raise DomainError("sphere point coordinates must be finite, length >= 2")
        if np.any(arr < 0.0):
            raise DomainError("sphere point coordinates must be nonnegative")
        sq = float(arr @ arr)
        if abs(sq - 1.0) > SUM_TOL:
            raise DomainError(f"sphere point must have unit norm, got |coords|^2 = {sq!r}")
        arr /= np.sqrt(sq)
        arr.flags.writeable = False
        object.__setattr__(self, "coords", arr)

    @property
    def dim(self) -> int:
        return self.coords.size - 1


@dataclass(frozen=True)
class TangentJacobian:
    """Jacobian of the reweight-then-square-root embedding at a base point.

    ``entries`` has shape (n, n + 1): rows are images of the tangent basis
    vectors e_i - e_{n+1}, columns are ambient sphere coordinates.
    """

    entries: np.ndarray
    base: SimplexPoint
    param: MetricParam

    def __post_init__(self) -> None:
        arr = np.array(self.entries, dtype=np.float64)
        n = self.base.dim
        if arr.shape != (n, n + 1):
            raise DimensionMismatchError(
                f"jacobian must have shape {(n, n + 1)}, got {arr.shape}"
            )
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)


@dataclass(frozen=True)
class GramMatrix:
    """Metric tensor J J^T in the e_i - e_{n+1} tangent basis; symmetric positive definite."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.entries, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DimensionMismatchError(f"gram matrix must be square, got {arr.shape}")
        if not np.allclose(arr, arr.T, rtol=0.0, atol=1e-12):
            raise DomainError("gram matrix must be symmetric")
        arr = 0.5 * (arr + arr.T)
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)

    def log_det(self) -> float:
        sign, value = np.linalg.slogdet(self.entries)
        if sign <= 0:
            raise DomainError("gram matrix is not positive definite")
        return float(value)


def _check_same_dim(a, b) -> None:
    if a.dim != b.dim:
        raise DimensionMismatchError(f"dimension mismatch: {a.dim} vs {b.dim}")


def fisher_distance(x: SimplexPoint, y: SimplexPoint) -> float:
    """Fisher information distance acos(sum_i sqrt(x_i y_i)), in [0, pi/2].

    This is the unit-sphere arc length between the square-root images of
    x and y; the inner product is clamped to [-1, 1] before the arc
    cosine so roundoff never leaves the domain.
    """
    _check_same_dim(x, y)
    dot = float(np.sqrt(x.coords) @ np.sqrt(y.coords))
    return float(np.arccos(min(1.0, max(-1.0, dot))))


def apply_transform(param: MetricParam, x: SimplexPoint) -> SimplexPoint:
    """Reweight x by param and renormalize: (x_i lambda_i) / (x . lambda)."""
    _check_same_dim(param, x)
    num = x.coords * param.weights
    dot = float(num.sum())
    if dot <= 0.0:
        raise DomainError("reweighted point has zero mass")
    return SimplexPoint(num / dot)


def invert_param(param: MetricParam) -> MetricParam:
    """Group inverse: normalized componentwise reciprocal of the weights."""
    inv = 1.0 / param.weights
    return MetricParam(inv / inv.sum())


def compose_params(outer: MetricParam, inner: MetricParam) -> MetricParam:
    """Parameter of the composed reweighting, the normalized componentwise product.

    ``apply_transform(compose_params(a, b), x)`` equals
    ``apply_transform(a, apply_transform(b, x))``.
    """
    _check_same_dim(outer, inner)
    prod = outer.weights * inner.weights
    return MetricParam(prod / prod.sum())


def sphere_map(param: MetricParam, x: SimplexPoint) -> SpherePoint:
    """Unit-sphere image sqrt((x_i lambda_i) / (x . lambda)) of the reweighted point."""
    _check_same_dim(param, x)
    num = x.coords * param.weights
    dot = float(num.sum())
    if dot <= 0.0:
        raise DomainError("reweighted point has zero mass")
    return SpherePoint(np.sqrt(num / dot))


def geodesic_distance(param: MetricParam, x: SimplexPoint, y: SimplexPoint) -> float:
    """Distance between x and y under the metric pulled back through param.

    Equal to the Fisher distance between the reweighted points, and
    computed exactly that way so the isometry holds to the last bit.
    """
    return fisher_distance(apply_transform(param, x), apply_transform(param, y))


def tangent_basis(n: int) -> np.ndarray:
    """Rows e_i - e_{n+1}, i = 1..n: the coordinate basis of the tangent space."""
    if n < 1:
        raise DomainError(f"tangent basis needs n >= 1, got {n}")
    basis = np.zeros((n, n + 1))
    basis[:, :n] = np.eye(n)
    basis[:, n] = -1.0
    return basis


def pushforward_jacobian(param: MetricParam, x: SimplexPoint) -> TangentJacobian:
    """Differential of the reweight-then-square-root embedding at interior x.

    Row i is the image of e_i - e_{n+1}.  In ambient coordinates the map
    sends v to (I - lambda x^T / (x . lambda)) v, scaled componentwise by
    sqrt(lambda_j / x_j) / (2 sqrt(x . lambda)).
    """
    _check_same_dim(param, x)
    if not x.interior:
        raise DomainError("jacobian requires an interior point")
    lam = param.weights
    xc = x.coords
    dot = float(xc @ lam)
    scale = np.sqrt(lam / xc) / (2.0 * np.sqrt(dot))
    core = (np.eye(xc.size) - np.outer(lam, xc) / dot) * scale[np.newaxis, :]
    entries = core[:-1, :] - core[-1:, :]
    return TangentJacobian(entries=entries, base=x, param=param)


def gram_matrix(param: MetricParam, x: SimplexPoint) -> GramMatrix:
    """Pulled-back metric tensor J J^T at interior x, in the e_i - e_{n+1} basis."""
    jac = pushforward_jacobian(param, x).entries
    gram = jac @ jac.T
    return GramMatrix(0.5 * (gram + gram.T))


def log_volume_element(param: MetricParam, x: SimplexPoint) -> float:
    """log sqrt(det G) at interior x, via the closed form.

    Expanding the determinant of the Gram matrix gives
    0.5 * (-n log 4 + sum_i log(lambda_i / x_i) - (n + 1) log(x . lambda)).
    """
    _check_same_dim(param, x)
    if not x.interior:
        raise DomainError("volume element requires an interior point")
    lam = param.weights
    xc = x.coords
    n = x.dim
    dot = float(xc @ lam)
    return 0.5 * float(
        -n * np.log(4.0) + np.log(lam / xc).sum() - (n + 1) * np.log(dot)
    )
