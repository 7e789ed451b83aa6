"""
X-bar charts: Phase-I estimation of (mu, sigma) and control limits.

A chart is built by estimating mu and sigma from Phase-I subgroups with one
of three estimator pairs and a pooling type, then placing the limits at
``mu_hat +/- g * sigma_hat / sqrt(n_k)``.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.stats import norm

from robust_xbar.core.errors import InvalidInputError
from robust_xbar.core.types import LocationKind, ScaleKind, Subgroup
from robust_xbar.estimators import estimate
from robust_xbar.factors.moments import c4
from robust_xbar.factors.table import FactorTable
from robust_xbar.pooling import PooledEstimate, PoolingType, pool_location, pool_scale

logger = logging.getLogger("robust_xbar.charts")

DEFAULT_G = 3.0


class Method(Enum):
    """Estimator pair used for Phase-I estimation."""

    I = "I"  # noqa: E741
    II = "II"
    III = "III"

    @classmethod
    def parse(cls, name: str) -> "Method":
        key = name.strip().upper()
        aliases = {"1": "I", "2": "II", "3": "III"}
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise InvalidInputError(f"unknown method: {name!r} (expected I, II or III)") from None

    def location(self, hl_variant: LocationKind = LocationKind.HL1) -> LocationKind:
        if self is Method.I:
            return LocationKind.MEAN
        if self is Method.II:
            return LocationKind.MEDIAN
        if not hl_variant.is_hodges_lehmann:
            raise InvalidInputError(f"{hl_variant.value} is not a Hodges-Lehmann variant")
        return hl_variant

    @property
    def scale(self) -> ScaleKind:
        return {Method.I: ScaleKind.STDDEV, Method.II: ScaleKind.MAD, Method.III: ScaleKind.SHAMOS}[self]


def location_pooling(pooling: PoolingType) -> PoolingType:
    """Location pooling paired with a chart pooling type; D pairs with the BLUE location."""
    return PoolingType.C if pooling is PoolingType.D else pooling


@dataclass(frozen=True)
class PhaseIEstimate:
    mu_hat: float
    sigma_hat: float
    method: Method
    pooling: PoolingType
    m: int
    sizes: Tuple[int, ...]
    factor_version: str
    location: PooledEstimate
    scale: PooledEstimate


@dataclass(frozen=True)
class ControlLimits:
    """Limits of an X-bar chart for Phase-II subgroups of size n_k."""

    lcl: float
    cl: float
    ucl: float
    g: float
    n_k: int

    @property
    def half_width(self) -> float:
        return self.ucl - self.cl


class MonitorResult(NamedTuple):
    """Outcome of monitoring a finite sequence of Phase-II means."""

    run_length: int
    censored: bool
    signal_index: Optional[int]


def phase1_estimate(
    samples: Sequence[Subgroup],
    method: Method,
    pooling: PoolingType,
    table: FactorTable,
    hl_variant: LocationKind = LocationKind.HL1,
) -> PhaseIEstimate:
    """
    Estimate (mu, sigma) from Phase-I subgroups.

    Args:
        samples: Phase-I subgroups, each of size >= 2
        method: Estimator pair
        pooling: Pooling type; D uses pooled-data scale and BLUE location
        table: Factor table covering every subgroup size
        hl_variant: Hodges-Lehmann variant for Method III

    Returns:
        PhaseIEstimate

    Raises:
        InvalidInputError: If there are no subgroups or one is too small
        TableIncompleteError: If a subgroup size is missing from the table
    """
    if len(samples) == 0:
        raise InvalidInputError("Phase-I estimation needs at least one subgroup")
    for sample in samples:
        if sample.n < 2:
            raise InvalidInputError(
                f"subgroup {sample.id!r} has n={sample.n}; every subgroup needs n >= 2"
            )

    location_kind = method.location(hl_variant)
    scale_kind = method.scale
    sizes = tuple(sample.n for sample in samples)

    location = pool_location(
        [estimate(location_kind, s) for s in samples],
        sizes,
        [table.var_std(location_kind, n) for n in sizes],
        location_pooling(pooling),
        estimator=location_kind,
    )
    scale_estimates = [estimate(scale_kind, s) for s in samples]
    if pooling is PoolingType.D:
        gamma, tau_sq = [], []
    else:
        gamma = [table.gamma(scale_kind, n) for n in sizes]
        tau_sq = [table.var_std(scale_kind, n) for n in sizes]
    scale = pool_scale(
        scale_estimates,
        gamma,
        tau_sq,
        sizes,
        pooling,
        raw_subgroups=samples,
        estimator=scale_kind,
        table=table,
    )
    logger.debug(
        f"Phase I ({method.value}, {pooling.value}) over m={len(samples)}: "
        f"mu_hat={location.value!r} sigma_hat={scale.value!r}"
    )
    return PhaseIEstimate(
        mu_hat=location.value,
        sigma_hat=max(scale.value, 0.0),
        method=method,
        pooling=pooling,
        m=len(samples),
        sizes=sizes,
        factor_version=table.fingerprint,
        location=location,
        scale=scale,
    )


def limits_from(mu_hat: float, sigma_hat: float, n_k: int, g: float = DEFAULT_G) -> ControlLimits:
    if n_k < 1:
        raise InvalidInputError(f"n_k must be >= 1, got {n_k}")
    if not g > 0:
        raise InvalidInputError(f"g must be positive, got {g}")
    half = g * sigma_hat / math.sqrt(n_k)
    return ControlLimits(lcl=mu_hat - half, cl=mu_hat, ucl=mu_hat + half, g=g, n_k=n_k)


def control_limits(est: PhaseIEstimate, n_k: int, g: float = DEFAULT_G) -> ControlLimits:
    """
    X-bar limits mu_hat -/+ g * sigma_hat / sqrt(n_k).

    Raises:
        InvalidInputError: If n_k < 1 or g <= 0
    """
    return limits_from(est.mu_hat, est.sigma_hat, n_k, g)


def pooled_variance_limits(samples: Sequence[Subgroup], n_k: int, g: float = DEFAULT_G) -> ControlLimits:
    """
    Classical limits from the square root of the pooled sample variance.

    CL is the grand mean and sigma is s_p / c4(n_k), so the half width is
    A3 * s_p for Phase-II subgroups of n_k. No Phase-I unbiasing factor is
    applied to s_p. Used as a cross-check against the textbook chart.

    Raises:
        InvalidInputError: If there are no subgroups, N <= m, or n_k < 2
    """
    values = [np.asarray(s.values, dtype=float) for s in samples]
    total = sum(v.size for v in values)
    if not values or total <= len(values):
        raise InvalidInputError("the pooled sample variance needs more observations than subgroups")
    squares = sum(float(np.sum((v - v.mean()) ** 2)) for v in values)
    s_p = math.sqrt(squares / (total - len(values)))
    return limits_from(float(np.concatenate(values).mean()), s_p / c4(n_k), n_k, g)


def first_signal(limits: ControlLimits, means: Union[Sequence[float], np.ndarray]) -> int:
    """1-based index of the first mean strictly outside the limits, 0 if none."""
    means = np.asarray(means, dtype=float)
    outside = (means < limits.lcl) | (means > limits.ucl)
    if not np.any(outside):
        return 0
    return int(np.argmax(outside)) + 1


def monitor(limits: ControlLimits, phase2_means: Sequence[float]) -> MonitorResult:
    """
    Run a chart over Phase-II subgroup means.

    A mean equal to a limit does not signal. When nothing signals the run
    length is censored at the number of means observed.
    """
    index = first_signal(limits, phase2_means)
    if index == 0:
        return MonitorResult(run_length=len(phase2_means), censored=True, signal_index=None)
    return MonitorResult(run_length=index, censored=False, signal_index=index)


def tail_probability(
    lcl: Union[float, np.ndarray],
    ucl: Union[float, np.ndarray],
    mu: float,
    standard_error: float,
) -> Union[float, np.ndarray]:
    """P(mean < lcl) + P(mean > ucl) for a mean ~ N(mu, standard_error^2); vectorised over limits."""
    return norm.cdf((lcl - mu) / standard_error) + norm.sf((ucl - mu) / standard_error)


def signal_probability(limits: ControlLimits, mu: float, sigma: float, n_k: Optional[int] = None) -> float:
    """
    Probability that one Phase-II mean from N(mu, sigma^2 / n_k) falls outside the limits.

    Args:
        limits: Control limits
        mu: Process mean
        sigma: Process standard deviation
        n_k: Phase-II subgroup size (defaults to the size the limits were built for)

    Raises:
        InvalidInputError: If sigma <= 0 or n_k < 1
    """
    if not sigma > 0:
        raise InvalidInputError(f"sigma must be positive, got {sigma}")
    n_k = limits.n_k if n_k is None else n_k
    if n_k < 1:
        raise InvalidInputError(f"n_k must be >= 1, got {n_k}")
    return float(tail_probability(limits.lcl, limits.ucl, mu, sigma / math.sqrt(n_k)))
