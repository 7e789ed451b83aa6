"""
Run-length distributions of X-bar charts with estimated limits.

For every replication the Phase-I data are drawn, the limits estimated, and
the in-control run length drawn as Geometric(p) where p is the analytic
probability that a Phase-II mean falls outside the limits. Replication r
draws from stream r of its cell, so results do not depend on the block
size or worker count. Run lengths above the cap, or with p = 0, are
censored at the cap and counted.
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.stats import skew

from robust_xbar.charts import ControlLimits, Method, first_signal, location_pooling, tail_probability
from robust_xbar.core.errors import InvalidInputError, UnsupportedCombinationError
from robust_xbar.core.reduction import map_ordered
from robust_xbar.core.streams import (
    TAG_FIXED_LIMITS,
    TAG_PHASE1,
    TAG_PHASE2,
    TAG_RUN_LENGTH,
    StreamFactory,
    block_bounds,
)
from robust_xbar.factors.moments import DEFAULT_BLOCK_SIZE
from robust_xbar.factors.table import FactorTable
from robust_xbar.ledger import recorded
from robust_xbar.pooling import PoolingType
from robust_xbar.simulation.config import PHASE2_SUBGROUPS, ScenarioConfig
from robust_xbar.simulation.efficiency import PooledEvaluator, phase1_block

logger = logging.getLogger("robust_xbar.simulation.run_length")

ChartCell = Tuple[Method, PoolingType]

_PHASE2_CHUNK = 4096


@dataclass(frozen=True)
class RunLengthSummary:
    arl: float
    sdrl: float
    prl: float
    percentile: float
    skewness: float
    censored_count: int
    replications: int

    @property
    def arl_standard_error(self) -> float:
        return self.sdrl / math.sqrt(self.replications)

    def to_dict(self) -> Dict[str, float]:
        return {
            "arl": self.arl,
            "sdrl": self.sdrl,
            "prl": self.prl,
            "percentile": self.percentile,
            "skewness": self.skewness,
            "censored_count": self.censored_count,
            "replications": self.replications,
        }


@dataclass(frozen=True)
class RunLengthCell:
    method: Method
    pooling: PoolingType
    summary: RunLengthSummary


@dataclass(frozen=True)
class RunLengthReport:
    config: ScenarioConfig
    cells: Tuple[RunLengthCell, ...]
    factor_version: str

    def cell(self, method: Method, pooling: PoolingType) -> RunLengthSummary:
        for cell in self.cells:
            if cell.method is method and cell.pooling is pooling:
                return cell.summary
        raise KeyError(f"no cell for (Method-{method.value}, {pooling.value})")

    def to_dict(self) -> Dict[str, object]:
        return {
            "study": "run_length",
            "config": self.config.describe(),
            "factor_version": self.factor_version,
            "cells": [
                dict(method=c.method.value, pooling=c.pooling.value, **c.summary.to_dict())
                for c in self.cells
            ],
        }


def summarize_run_lengths(
    rls: Union[Sequence[int], np.ndarray],
    censored: Optional[Union[Sequence[bool], np.ndarray]] = None,
    percentile: float = 99.0,
) -> RunLengthSummary:
    """
    ARL, SDRL, percentile and skewness of run lengths.

    Censored run lengths enter the statistics at their censoring value.
    SDRL uses the n-1 denominator (0 for a single run), the percentile
    linear interpolation between order statistics, and the skewness the
    moment form g1 = m3 / m2^(3/2), reported as 0 when all runs are equal.

    Raises:
        InvalidInputError: If ``rls`` is empty or the flags do not match it
    """
    values = np.asarray(rls, dtype=float)
    if values.ndim != 1 or values.size == 0:
        raise InvalidInputError("run lengths must be a non-empty sequence")
    flags = np.zeros(values.size, dtype=bool) if censored is None else np.asarray(censored, dtype=bool)
    if flags.shape != values.shape:
        raise InvalidInputError("censoring flags must match the run lengths")
    constant = bool(np.all(values == values[0]))
    return RunLengthSummary(
        arl=float(np.mean(values)),
        sdrl=float(np.std(values, ddof=1)) if values.size > 1 else 0.0,
        prl=float(np.percentile(values, percentile, method="linear")),
        percentile=float(percentile),
        skewness=0.0 if constant else float(skew(values, bias=True)),
        censored_count=int(np.sum(flags)),
        replications=int(values.size),
    )


def geometric_run_lengths(
    generator: np.random.Generator, p: np.ndarray, rl_cap: int
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Draw RL ~ Geometric(p) for each p, censoring at ``rl_cap``.

    One draw is consumed per entry whatever its p, so streams stay aligned.
    """
    p = np.asarray(p, dtype=float)
    usable = p > 0
    draws = generator.geometric(np.where(usable, np.minimum(p, 1.0), 1.0))
    censored = ~usable | (draws > rl_cap) | (draws < 1)
    return np.where(censored, rl_cap, draws).astype(np.int64), censored


def replication_run_lengths(
    streams: StreamFactory, start: int, p: np.ndarray, rl_cap: int
) -> Tuple[np.ndarray, np.ndarray]:
    """Geometric run lengths of replications start, start + 1, ..., each from its own stream."""
    p = np.asarray(p, dtype=float)
    rls = np.empty(p.size, dtype=np.int64)
    flags = np.empty(p.size, dtype=bool)
    for row in range(p.size):
        drawn, censored = geometric_run_lengths(streams.generator(start + row), p[row:row + 1], rl_cap)
        rls[row], flags[row] = drawn[0], censored[0]
    return rls, flags


def _cell_tags(method: Method, pooling: PoolingType) -> Tuple[int, int]:
    return list(Method).index(method), list(PoolingType).index(pooling)


def _phase2_run_length(
    generator: np.random.Generator,
    limits: ControlLimits,
    mu: float,
    sigma: float,
    rl_cap: int,
) -> Tuple[int, bool]:
    observed = 0
    while observed < rl_cap:
        count = min(_PHASE2_CHUNK, rl_cap - observed)
        means = np.mean(mu + sigma * generator.standard_normal((count, limits.n_k)), axis=1)
        index = first_signal(limits, means)
        if index:
            return observed + index, False
        observed += count
    return rl_cap, True


def _run_cells(
    config: ScenarioConfig, cells: Sequence[ChartCell], table: FactorTable
) -> List[RunLengthSummary]:
    for method, pooling in cells:
        if pooling is PoolingType.D:
            raise UnsupportedCombinationError(
                f"run-length studies cover pooling types A, B and C, not D (Method-{method.value})"
            )

    estimator_cells = []
    for method, pooling in cells:
        estimator_cells.append((method.location(config.hl_variant), location_pooling(pooling)))
        estimator_cells.append((method.scale, pooling))
    evaluator = PooledEvaluator(config.sizes, list(dict.fromkeys(estimator_cells)), table)
    columns = {cell: index for index, cell in enumerate(evaluator.cells)}

    phase1 = StreamFactory(config.master_seed, TAG_PHASE1)
    tags = [_cell_tags(method, pooling) for method, pooling in cells]
    rl_streams = [StreamFactory(config.master_seed, TAG_RUN_LENGTH, *t) for t in tags]
    phase2_streams = [StreamFactory(config.master_seed, TAG_PHASE2, *t) for t in tags]
    bounds = block_bounds(config.replications, config.block_size)
    standard_error = config.sigma0 / math.sqrt(config.n_k)

    def run_block(index: int) -> List[Tuple[np.ndarray, np.ndarray]]:
        start, stop = bounds[index]
        pooled = evaluator.evaluate(phase1_block(phase1, start, stop, config))
        results = []
        for position, (method, pooling) in enumerate(cells):
            mu_hat = pooled[:, columns[(method.location(config.hl_variant), location_pooling(pooling))]]
            sigma_hat = np.maximum(pooled[:, columns[(method.scale, pooling)]], 0.0)
            half = config.g * sigma_hat / math.sqrt(config.n_k)
            if config.phase2_mode == PHASE2_SUBGROUPS:
                rls = np.empty(stop - start, dtype=np.int64)
                flags = np.empty(stop - start, dtype=bool)
                for row, replication in enumerate(range(start, stop)):
                    limits = ControlLimits(
                        lcl=float(mu_hat[row] - half[row]),
                        cl=float(mu_hat[row]),
                        ucl=float(mu_hat[row] + half[row]),
                        g=config.g,
                        n_k=config.n_k,
                    )
                    rls[row], flags[row] = _phase2_run_length(
                        phase2_streams[position].generator(replication),
                        limits,
                        config.mu0,
                        config.sigma0,
                        config.rl_cap,
                    )
            else:
                p = tail_probability(mu_hat - half, mu_hat + half, config.mu0, standard_error)
                rls, flags = replication_run_lengths(rl_streams[position], start, p, config.rl_cap)
            results.append((rls, flags))
        logger.debug(f"Run-length block {index + 1}/{len(bounds)} done")
        return results

    blocks = map_ordered(run_block, range(len(bounds)), config.workers)
    summaries = []
    for position in range(len(cells)):
        rls = np.concatenate([block[position][0] for block in blocks])
        flags = np.concatenate([block[position][1] for block in blocks])
        summaries.append(summarize_run_lengths(rls, flags, config.percentile))
    return summaries


def run_length_study(
    config: ScenarioConfig,
    method: Method,
    pooling: PoolingType,
    table: FactorTable,
    n_k: Optional[int] = None,
    rl_cap: Optional[int] = None,
) -> RunLengthSummary:
    """
    Run-length summary of one chart variant.

    Args:
        config: Phase-I plan, process parameters, replications and seed
        method: Estimator pair
        pooling: A, B or C
        table: Factor table covering the plan's sizes
        n_k: Phase-II subgroup size (the configuration's by default)
        rl_cap: Censoring cap (the configuration's by default)

    Raises:
        UnsupportedCombinationError: For pooling type D
    """
    if n_k is not None or rl_cap is not None:
        config = replace(config, n_k=n_k or config.n_k, rl_cap=rl_cap or config.rl_cap)
    return _run_cells(config, [(method, pooling)], table)[0]


@recorded(name="simulation.run_length_grid")
def run_length_grid(config: ScenarioConfig, table: FactorTable) -> RunLengthReport:
    """
    Run-length summaries of every configured (method, pooling) cell.

    Each cell draws its run lengths from its own stream, so a cell is
    identical whether computed here or alone with ``run_length_study``.
    """
    cells = [(method, pooling) for method in config.methods for pooling in config.poolings]
    logger.info(
        f"Run-length study {config.label or list(config.sizes)}: {config.replications} replications, "
        f"seed={config.master_seed}, nk={config.n_k}, cap={config.rl_cap}, "
        f"mode={config.phase2_mode}, {len(cells)} cells"
    )
    summaries = _run_cells(config, cells, table)
    for (method, pooling), summary in zip(cells, summaries):
        if summary.censored_count:
            logger.warning(
                f"Method-{method.value} {pooling.value}: {summary.censored_count} of "
                f"{summary.replications} run lengths censored at {config.rl_cap}"
            )
    return RunLengthReport(
        config=config,
        cells=tuple(RunLengthCell(m, p, s) for (m, p), s in zip(cells, summaries)),
        factor_version=table.fingerprint,
    )


@recorded(name="simulation.fixed_limits_study")
def fixed_limits_study(
    limits: ControlLimits,
    mu: float,
    sigma: float,
    replications: int,
    seed: int,
    rl_cap: int = 10_000_000,
    percentile: float = 99.0,
    block_size: int = DEFAULT_BLOCK_SIZE,
    workers: int = 1,
) -> RunLengthSummary:
    """
    Run lengths of a chart whose limits are known rather than estimated.

    With limits at mu +/- 3 sigma / sqrt(n_k) the ARL is 1 / (2 Phi(-3)).
    """
    if replications < 1:
        raise InvalidInputError(f"replications must be >= 1, got {replications}")
    p = float(tail_probability(limits.lcl, limits.ucl, mu, sigma / math.sqrt(limits.n_k)))
    streams = StreamFactory(seed, TAG_FIXED_LIMITS)
    bounds = block_bounds(replications, block_size)

    def run_block(index: int) -> Tuple[np.ndarray, np.ndarray]:
        start, stop = bounds[index]
        return replication_run_lengths(streams, start, np.full(stop - start, p), rl_cap)

    blocks = map_ordered(run_block, range(len(bounds)), workers)
    return summarize_run_lengths(
        np.concatenate([b[0] for b in blocks]), np.concatenate([b[1] for b in blocks]), percentile
    )
