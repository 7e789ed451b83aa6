"""
Pooling of per-subgroup estimates across subgroups of unequal sizes.

Location estimates are combined with weights summing to one; scale estimates
with weights satisfying ``sum(w_i * gamma_i) = 1``, which makes the pooled
estimate unbiased for sigma under normality. Weights are always returned
with the pooled value.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from robust_xbar.core.errors import InvalidInputError, UnsupportedCombinationError
from robust_xbar.core.types import Estimator, LocationKind, ScaleKind, Subgroup
from robust_xbar.estimators import batch_mad
from robust_xbar.factors.moments import c4
from robust_xbar.factors.table import FactorTable, unbiasing_factor

logger = logging.getLogger("robust_xbar.pooling")

ArrayLike = Union[Sequence[float], np.ndarray]

KIND_LOCATION = "location"
KIND_SCALE = "scale"


class PoolingType(Enum):
    """
    A: simple average of unbiased estimates.
    B: size-weighted (location) or factor-weighted (scale) average.
    C: best linear unbiased weights.
    D: estimator applied to the pooled data (scale only, SD and MAD).
    """

    A = "A"
    B = "B"
    C = "C"
    D = "D"

    @classmethod
    def parse(cls, name: str) -> "PoolingType":
        try:
            return cls(name.strip().upper())
        except ValueError:
            raise InvalidInputError(f"unknown pooling type: {name!r}") from None


@dataclass(frozen=True)
class PooledEstimate:
    """A pooled estimate together with the weights that produced it."""

    value: float
    weights: Tuple[float, ...]
    kind: str
    estimator: Estimator
    pooling: PoolingType
    theoretical_var_factor: float


def _vector(name: str, values: ArrayLike, positive: bool = False) -> np.ndarray:
    array = np.asarray(values, dtype=float)
    if array.ndim != 1 or array.size == 0:
        raise InvalidInputError(f"{name} must be a non-empty sequence")
    if not np.all(np.isfinite(array)):
        raise InvalidInputError(f"{name} must be finite")
    if positive and np.any(array <= 0):
        raise InvalidInputError(f"{name} must be positive, got {array.tolist()}")
    return array


def _same_length(**vectors: np.ndarray) -> None:
    lengths = {name: v.size for name, v in vectors.items()}
    if len(set(lengths.values())) > 1:
        raise InvalidInputError(f"length mismatch: {lengths}")


def blue_location_weights(nu_sq: ArrayLike) -> np.ndarray:
    """w_i = (1 / nu_i^2) / sum_j (1 / nu_j^2)."""
    nu_sq = _vector("nu_sq", nu_sq, positive=True)
    inverse = 1.0 / nu_sq
    return inverse / np.sum(inverse)


def blue_scale_weights(gamma: ArrayLike, tau_sq: ArrayLike) -> np.ndarray:
    """w_i = (gamma_i / tau_i^2) / sum_j (gamma_j^2 / tau_j^2)."""
    gamma = _vector("gamma", gamma, positive=True)
    tau_sq = _vector("tau_sq", tau_sq, positive=True)
    _same_length(gamma=gamma, tau_sq=tau_sq)
    return (gamma / tau_sq) / np.sum(gamma * gamma / tau_sq)


def location_weights(pooling: PoolingType, sizes: ArrayLike, nu_sq: ArrayLike) -> np.ndarray:
    """
    Weights of location pooling types A, B and C.

    Raises:
        UnsupportedCombinationError: For pooling type D
    """
    sizes = _vector("sizes", sizes, positive=True)
    nu_sq = _vector("nu_sq", nu_sq, positive=True)
    _same_length(sizes=sizes, nu_sq=nu_sq)
    if pooling is PoolingType.A:
        return np.full(sizes.size, 1.0 / sizes.size)
    if pooling is PoolingType.B:
        return sizes / np.sum(sizes)
    if pooling is PoolingType.C:
        return blue_location_weights(nu_sq)
    raise UnsupportedCombinationError("pooling type D is defined for scale estimators only")


def scale_weights(pooling: PoolingType, gamma: ArrayLike, tau_sq: ArrayLike) -> np.ndarray:
    """
    Weights of scale pooling types A, B and C, applied to raw (biased) estimates.

    Raises:
        UnsupportedCombinationError: For pooling type D, which has no linear weights
    """
    gamma = _vector("gamma", gamma, positive=True)
    tau_sq = _vector("tau_sq", tau_sq, positive=True)
    _same_length(gamma=gamma, tau_sq=tau_sq)
    if pooling is PoolingType.A:
        return 1.0 / (gamma.size * gamma)
    if pooling is PoolingType.B:
        return np.full(gamma.size, 1.0 / np.sum(gamma))
    if pooling is PoolingType.C:
        return blue_scale_weights(gamma, tau_sq)
    raise UnsupportedCombinationError("pooling type D pools the data, not the estimates")


def pooled_variance_factor(
    weights: ArrayLike,
    gamma: Optional[ArrayLike],
    var_std: ArrayLike,
    kind: str = KIND_LOCATION,
) -> float:
    """
    Variance of a linearly pooled estimator in units of sigma^2.

    Args:
        weights: Pooling weights
        gamma: Unbiasing factors (scale only, used to check the constraint)
        var_std: Standardized variances nu_i^2 or tau_i^2
        kind: "location" or "scale"

    Returns:
        sum(w_i^2 * var_std_i)

    Raises:
        InvalidInputError: On length mismatch or an unknown kind
    """
    weights = _vector("weights", weights)
    var_std = _vector("var_std", var_std, positive=True)
    _same_length(weights=weights, var_std=var_std)
    if kind == KIND_SCALE and gamma is not None:
        gamma_vector = _vector("gamma", gamma, positive=True)
        _same_length(weights=weights, gamma=gamma_vector)
        constraint = float(np.dot(weights, gamma_vector))
        if abs(constraint - 1.0) > 1e-9:
            logger.warning(f"scale weights give sum(w * gamma) = {constraint!r}, pooled estimate is biased")
    elif kind not in (KIND_LOCATION, KIND_SCALE):
        raise InvalidInputError(f"unknown estimate kind: {kind!r}")
    return float(np.sum(weights * weights * var_std))


def pool_location(
    estimates: ArrayLike,
    sizes: ArrayLike,
    nu_sq: ArrayLike,
    pooling: PoolingType,
    estimator: LocationKind = LocationKind.MEAN,
) -> PooledEstimate:
    """
    Pool per-subgroup location estimates.

    Args:
        estimates: Per-subgroup location estimates
        sizes: Subgroup sizes
        nu_sq: Standardized variances of the estimator at each size
        pooling: A, B or C
        estimator: Estimator that produced ``estimates`` (provenance only)

    Raises:
        InvalidInputError: On length mismatch or nonpositive variances
        UnsupportedCombinationError: For pooling type D
    """
    estimates = _vector("estimates", estimates)
    _same_length(estimates=estimates, sizes=np.asarray(sizes), nu_sq=np.asarray(nu_sq))
    weights = location_weights(pooling, sizes, nu_sq)
    return PooledEstimate(
        value=float(np.dot(weights, estimates)),
        weights=tuple(float(w) for w in weights),
        kind=KIND_LOCATION,
        estimator=estimator,
        pooling=pooling,
        theoretical_var_factor=pooled_variance_factor(weights, None, nu_sq, KIND_LOCATION),
    )


def _pooled_std_dev(raw_subgroups: Sequence[Subgroup]) -> PooledEstimate:
    sizes = np.array([s.n for s in raw_subgroups], dtype=float)
    total, m = int(np.sum(sizes)), len(raw_subgroups)
    if np.any(sizes < 2):
        raise InvalidInputError("pooled standard deviation needs every subgroup of size >= 2")
    sum_squares = sum(
        float(np.sum((s.as_array() - np.mean(s.as_array())) ** 2)) for s in raw_subgroups
    )
    factor = c4(total - m + 1)
    weights = (sizes - 1.0) / (total - m)
    return PooledEstimate(
        value=float(np.sqrt(sum_squares / (total - m)) / factor),
        weights=tuple(float(w) for w in weights),
        kind=KIND_SCALE,
        estimator=ScaleKind.STDDEV,
        pooling=PoolingType.D,
        theoretical_var_factor=1.0 / (factor * factor) - 1.0,
    )


def _pooled_mad(raw_subgroups: Sequence[Subgroup], table: Optional[FactorTable]) -> PooledEstimate:
    data = np.concatenate([s.as_array() for s in raw_subgroups])
    total = data.size
    factor = unbiasing_factor(ScaleKind.MAD, total, table)
    var_std = table.var_std(ScaleKind.MAD, total)
    sizes = np.array([s.n for s in raw_subgroups], dtype=float)
    return PooledEstimate(
        value=float(batch_mad(data)) / factor,
        weights=tuple(float(w) for w in sizes / total),
        kind=KIND_SCALE,
        estimator=ScaleKind.MAD,
        pooling=PoolingType.D,
        theoretical_var_factor=var_std / (factor * factor),
    )


def pool_scale(
    estimates: ArrayLike,
    gamma: ArrayLike,
    tau_sq: ArrayLike,
    sizes: ArrayLike,
    pooling: PoolingType,
    raw_subgroups: Optional[Sequence[Subgroup]] = None,
    estimator: ScaleKind = ScaleKind.STDDEV,
    table: Optional[FactorTable] = None,
) -> PooledEstimate:
    """
    Pool per-subgroup scale estimates into an unbiased estimate of sigma.

    Types A, B and C weight the raw estimates; type D recomputes the
    estimator on the pooled data: the pooled standard deviation over
    c4(N - m + 1) for SD, or the MAD of all N observations around their
    global median over c5(N) for MAD.

    Args:
        estimates: Raw per-subgroup scale estimates
        gamma: Unbiasing factors at each size
        tau_sq: Standardized variances at each size
        sizes: Subgroup sizes
        pooling: A, B, C or D
        raw_subgroups: The subgroups themselves, required for type D
        estimator: Estimator that produced ``estimates``
        table: Factor table supplying c5(N) for pooled MAD

    Raises:
        InvalidInputError: On length mismatch, nonpositive factors, or D without data
        UnsupportedCombinationError: For type D with Shamos
        TableIncompleteError: For pooled MAD when the table lacks (MAD, N)
    """
    if pooling is PoolingType.D:
        if raw_subgroups is None or len(raw_subgroups) == 0:
            raise InvalidInputError("pooling type D needs the raw subgroups")
        if estimator is ScaleKind.STDDEV:
            return _pooled_std_dev(raw_subgroups)
        if estimator is ScaleKind.MAD:
            return _pooled_mad(raw_subgroups, table)
        raise UnsupportedCombinationError(
            f"pooling type D is defined for SD and MAD only, not {estimator.value}"
        )

    estimates = _vector("estimates", estimates)
    gamma = _vector("gamma", gamma, positive=True)
    tau_sq = _vector("tau_sq", tau_sq, positive=True)
    _same_length(estimates=estimates, gamma=gamma, tau_sq=tau_sq, sizes=np.asarray(sizes))
    weights = scale_weights(pooling, gamma, tau_sq)
    return PooledEstimate(
        value=float(np.dot(weights, estimates)),
        weights=tuple(float(w) for w in weights),
        kind=KIND_SCALE,
        estimator=estimator,
        pooling=pooling,
        theoretical_var_factor=pooled_variance_factor(weights, gamma, tau_sq, KIND_SCALE),
    )


def theoretical_variance_factor(
    estimator: Estimator, pooling: PoolingType, sizes: Sequence[int], table: FactorTable
) -> float:
    """
    Var(pooled) / sigma^2 under normality for an estimator, pooling type and sizes.

    Raises:
        UnsupportedCombinationError: For type D with anything but SD and MAD
        TableIncompleteError: If a needed factor is missing
    """
    sizes = [int(n) for n in sizes]
    var_std = [table.var_std(estimator, n) for n in sizes]
    if isinstance(estimator, LocationKind):
        return pooled_variance_factor(location_weights(pooling, sizes, var_std), None, var_std)
    if pooling is PoolingType.D:
        total, m = sum(sizes), len(sizes)
        if estimator is ScaleKind.STDDEV:
            return 1.0 / c4(total - m + 1) ** 2 - 1.0
        if estimator is ScaleKind.MAD:
            return table.var_std(ScaleKind.MAD, total) / table.gamma(ScaleKind.MAD, total) ** 2
        raise UnsupportedCombinationError(
            f"pooling type D is defined for SD and MAD only, not {estimator.value}"
        )
    gamma = [table.gamma(estimator, n) for n in sizes]
    return pooled_variance_factor(scale_weights(pooling, gamma, var_std), gamma, var_std, KIND_SCALE)
