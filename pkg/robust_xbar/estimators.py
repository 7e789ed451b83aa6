"""
Per-subgroup location and scale estimators.

Each estimator comes in two forms: a scalar operation on one ``Subgroup`` and a
batch form that reduces the last axis of an array of shape ``(..., n)``. The
scalar forms delegate to the batch forms so both agree bit for bit.
"""

import math
from functools import lru_cache
from typing import Callable, Dict, Sequence, Tuple, Union

import numpy as np
from scipy.stats import norm

from robust_xbar.core.errors import InvalidInputError
from robust_xbar.core.types import Estimator, LocationKind, ScaleKind, Subgroup

# Phi^{-1}(3/4)
NORMAL_Q3 = float(norm.ppf(0.75))
SHAMOS_CONSTANT = math.sqrt(2.0) * NORMAL_Q3

SampleLike = Union[Subgroup, Sequence[float], np.ndarray]


def min_size(estimator: Estimator) -> int:
    """Smallest subgroup size the estimator is defined for."""
    if isinstance(estimator, ScaleKind) or estimator is LocationKind.HL1:
        return 2
    return 1


def _as_batch(values: np.ndarray, estimator: Estimator) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if values.ndim == 0:
        raise InvalidInputError("estimators need at least one axis of observations")
    n = values.shape[-1]
    needed = min_size(estimator)
    if n < needed:
        raise InvalidInputError(
            f"{estimator.value} needs subgroups of size >= {needed}, got n={n}"
        )
    return values


@lru_cache(maxsize=None)
def _pair_indices(n: int, variant: LocationKind) -> Tuple[np.ndarray, np.ndarray]:
    if variant is LocationKind.HL1:
        return np.triu_indices(n, k=1)
    if variant is LocationKind.HL2:
        return np.triu_indices(n, k=0)
    rows, cols = np.indices((n, n))
    return rows.ravel(), cols.ravel()


def batch_mean(values: np.ndarray) -> np.ndarray:
    return np.mean(_as_batch(values, LocationKind.MEAN), axis=-1)


def batch_median(values: np.ndarray) -> np.ndarray:
    return np.median(_as_batch(values, LocationKind.MEDIAN), axis=-1)


def batch_hodges_lehmann(values: np.ndarray, variant: LocationKind = LocationKind.HL1) -> np.ndarray:
    """
    Median of Walsh averages along the last axis.

    Args:
        values: Array of shape (..., n)
        variant: HL1 (k < l), HL2 (k <= l) or HL3 (all ordered pairs)

    Returns:
        Array of shape (...)
    """
    if not variant.is_hodges_lehmann:
        raise InvalidInputError(f"{variant.value} is not a Hodges-Lehmann variant")
    values = _as_batch(values, variant)
    rows, cols = _pair_indices(values.shape[-1], variant)
    walsh = (values[..., rows] + values[..., cols]) / 2.0
    return np.median(walsh, axis=-1)


def batch_std_dev(values: np.ndarray) -> np.ndarray:
    return np.std(_as_batch(values, ScaleKind.STDDEV), axis=-1, ddof=1)


def batch_mad(values: np.ndarray) -> np.ndarray:
    values = _as_batch(values, ScaleKind.MAD)
    center = np.median(values, axis=-1, keepdims=True)
    return np.median(np.abs(values - center), axis=-1) / NORMAL_Q3


def batch_shamos(values: np.ndarray) -> np.ndarray:
    values = _as_batch(values, ScaleKind.SHAMOS)
    rows, cols = _pair_indices(values.shape[-1], LocationKind.HL1)
    differences = np.abs(values[..., rows] - values[..., cols])
    return np.median(differences, axis=-1) / SHAMOS_CONSTANT


_BATCH: Dict[Estimator, Callable[[np.ndarray], np.ndarray]] = {
    LocationKind.MEAN: batch_mean,
    LocationKind.MEDIAN: batch_median,
    LocationKind.HL1: lambda v: batch_hodges_lehmann(v, LocationKind.HL1),
    LocationKind.HL2: lambda v: batch_hodges_lehmann(v, LocationKind.HL2),
    LocationKind.HL3: lambda v: batch_hodges_lehmann(v, LocationKind.HL3),
    ScaleKind.STDDEV: batch_std_dev,
    ScaleKind.MAD: batch_mad,
    ScaleKind.SHAMOS: batch_shamos,
}


def batch_estimate(estimator: Estimator, values: np.ndarray) -> np.ndarray:
    """Apply any estimator along the last axis of ``values``."""
    return _BATCH[estimator](values)


def _values(sample: SampleLike) -> np.ndarray:
    if isinstance(sample, Subgroup):
        return sample.as_array()
    values = np.asarray(sample, dtype=float)
    if values.ndim != 1:
        raise InvalidInputError("a subgroup is a one-dimensional sequence of values")
    if not np.all(np.isfinite(values)):
        raise InvalidInputError("subgroup values must be finite")
    return values


def estimate(estimator: Estimator, sample: SampleLike) -> float:
    """
    Apply an estimator to a single subgroup.

    Raises:
        InvalidInputError: If the subgroup is too small for the estimator
    """
    return float(batch_estimate(estimator, _values(sample)))


def mean(sample: SampleLike) -> float:
    return estimate(LocationKind.MEAN, sample)


def median(sample: SampleLike) -> float:
    return estimate(LocationKind.MEDIAN, sample)


def hodges_lehmann(sample: SampleLike, variant: LocationKind = LocationKind.HL1) -> float:
    return float(batch_hodges_lehmann(_values(sample), variant))


def std_dev(sample: SampleLike) -> float:
    return estimate(ScaleKind.STDDEV, sample)


def mad(sample: SampleLike) -> float:
    """Fisher-consistent median absolute deviation from the median."""
    return estimate(ScaleKind.MAD, sample)


def shamos(sample: SampleLike) -> float:
    """Median of pairwise absolute differences, Fisher-consistent at the normal."""
    return estimate(ScaleKind.SHAMOS, sample)
