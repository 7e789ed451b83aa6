"""
Standardized moments of the estimators under the normal distribution.

The unbiasing factor of a scale estimator is its expectation at N(0, 1); the
standardized variance of any estimator is its variance at N(0, 1). Both are
analytic for the mean and the standard deviation and Monte-Carlo everywhere
else.
"""

import logging
import math
from typing import NamedTuple, Optional

import numpy as np
from scipy.special import gammaln

from robust_xbar.core.errors import InvalidInputError
from robust_xbar.core.reduction import BlockMoments, map_ordered, pairwise_merge
from robust_xbar.core.streams import TAG_FACTORS, StreamFactory, block_bounds
from robust_xbar.core.types import Estimator, LocationKind, ScaleKind
from robust_xbar.estimators import batch_estimate, min_size

logger = logging.getLogger("robust_xbar.factors")

MIN_REPLICATIONS = 10_000
DEFAULT_BLOCK_SIZE = 4096


class StandardMoments(NamedTuple):
    """Expectation and variance of a raw estimator."""

    gamma: float
    var_std: float


def c4(n: int) -> float:
    """
    Unbiasing factor of the sample standard deviation.

    Evaluated through log-gamma so it stays finite for large n.

    Raises:
        InvalidInputError: If n < 2
    """
    if n < 2:
        raise InvalidInputError(f"c4 needs n >= 2, got n={n}")
    log_value = 0.5 * math.log(2.0 / (n - 1)) + gammaln(n / 2.0) - gammaln((n - 1) / 2.0)
    return float(math.exp(log_value))


def analytic_moments(estimator: Estimator, n: int) -> Optional[StandardMoments]:
    """
    Closed-form standardized moments, where they exist.

    Returns:
        The moments for the mean and the standard deviation, None otherwise
    """
    if n < min_size(estimator):
        raise InvalidInputError(f"{estimator.value} needs n >= {min_size(estimator)}, got n={n}")
    if estimator is LocationKind.MEAN:
        return StandardMoments(gamma=0.0, var_std=1.0 / n)
    if estimator is ScaleKind.STDDEV:
        factor = c4(n)
        return StandardMoments(gamma=factor, var_std=1.0 - factor * factor)
    return None


def simulate_standard_moments(
    estimator: Estimator,
    n: int,
    replications: int,
    seed: int,
    workers: int = 1,
    mu: float = 0.0,
    sigma: float = 1.0,
    block_size: int = DEFAULT_BLOCK_SIZE,
) -> StandardMoments:
    """
    Monte-Carlo expectation and variance of an estimator at N(mu, sigma^2).

    Draws are split into fixed-size blocks; block ``b`` always uses stream
    ``(seed, n, b)``, so all estimators share the same samples for a given n
    and the result does not depend on ``workers``.

    Args:
        estimator: Location or scale estimator
        n: Subgroup size
        replications: Number of simulated subgroups, at least 10^4
        seed: Master seed
        workers: Threads used to evaluate blocks
        mu: Location of the sampled normal distribution
        sigma: Scale of the sampled normal distribution
        block_size: Draws per block

    Returns:
        StandardMoments with the empirical mean and (n-1)-denominator variance

    Raises:
        InvalidInputError: If replications < 10^4 or n is too small
    """
    if replications < MIN_REPLICATIONS:
        raise InvalidInputError(
            f"replications must be >= {MIN_REPLICATIONS}, got {replications}"
        )
    if n < min_size(estimator):
        raise InvalidInputError(f"{estimator.value} needs n >= {min_size(estimator)}, got n={n}")
    if sigma <= 0:
        raise InvalidInputError(f"sigma must be positive, got {sigma}")

    streams = StreamFactory(seed, TAG_FACTORS, n)
    bounds = block_bounds(replications, block_size)

    def run_block(index: int) -> BlockMoments:
        start, stop = bounds[index]
        draws = streams.generator(index).standard_normal((stop - start, n))
        if mu != 0.0 or sigma != 1.0:
            draws = mu + sigma * draws
        return BlockMoments.of(batch_estimate(estimator, draws))

    logger.debug(
        f"Simulating {estimator.value} n={n}: {replications} replications in "
        f"{len(bounds)} blocks, seed={seed}, workers={workers}"
    )
    total = pairwise_merge(map_ordered(run_block, range(len(bounds)), workers))
    return StandardMoments(gamma=float(total.mean), var_std=float(total.variance(ddof=1)))


def standard_error(moments: StandardMoments, replications: int) -> float:
    """Monte-Carlo standard error of the simulated expectation."""
    return math.sqrt(moments.var_std / replications)
