"""
Efficiency of pooled estimators under clean and contaminated normal data.

Every replication draws one Phase-I dataset from its own counter-based
stream, so all (estimator, pooling) cells are evaluated on the same data and
any replication can be regenerated alone.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from robust_xbar.core.errors import InvalidInputError
from robust_xbar.core.reduction import BlockMoments, map_ordered, pairwise_merge
from robust_xbar.core.streams import TAG_PHASE1, StreamFactory, block_bounds
from robust_xbar.core.types import ALL_ESTIMATORS, Estimator, LocationKind, ScaleKind
from robust_xbar.estimators import NORMAL_Q3, batch_estimate
from robust_xbar.factors.moments import c4
from robust_xbar.factors.table import FactorTable
from robust_xbar.ledger import recorded
from robust_xbar.pooling import (
    KIND_LOCATION,
    KIND_SCALE,
    PoolingType,
    location_weights,
    scale_weights,
    theoretical_variance_factor,
)
from robust_xbar.simulation.config import ScenarioConfig

logger = logging.getLogger("robust_xbar.simulation.efficiency")

BASELINE_LOCATION = (LocationKind.MEAN, PoolingType.C)
BASELINE_SCALE = (ScaleKind.STDDEV, PoolingType.C)

Cell = Tuple[Estimator, PoolingType]


@dataclass(frozen=True)
class EfficiencyCell:
    estimator: Estimator
    pooling: PoolingType
    kind: str
    variance: float
    bias: float
    mse: float
    re_percent: float
    theoretical_variance: float

    def to_dict(self) -> Dict[str, object]:
        return {
            "kind": self.kind,
            "estimator": self.estimator.value,
            "pooling": self.pooling.value,
            "variance": self.variance,
            "bias": self.bias,
            "mse": self.mse,
            "re_percent": self.re_percent,
            "theoretical_variance": self.theoretical_variance,
        }


@dataclass(frozen=True)
class EfficiencyBaseline:
    """
    Reference precision of the BLUE mean and BLUE standard deviation on clean data.

    ``location`` and ``scale`` are variances when the study is clean and
    MSEs of the clean run when it is contaminated; both coincide up to
    Monte-Carlo noise since the clean estimators are unbiased.
    """

    sizes: Tuple[int, ...]
    location: float
    scale: float


@dataclass(frozen=True)
class EfficiencyReport:
    config: ScenarioConfig
    baseline: EfficiencyBaseline
    cells: Tuple[EfficiencyCell, ...]
    factor_version: str

    def cell(self, estimator: Estimator, pooling: PoolingType) -> EfficiencyCell:
        for cell in self.cells:
            if cell.estimator is estimator and cell.pooling is pooling:
                return cell
        raise KeyError(f"no cell for ({estimator.value}, {pooling.value})")

    def to_dict(self) -> Dict[str, object]:
        return {
            "study": "efficiency",
            "config": self.config.describe(),
            "factor_version": self.factor_version,
            "baseline": {
                "location": {"estimator": BASELINE_LOCATION[0].value, "pooling": "C", "value": self.baseline.location},
                "scale": {"estimator": BASELINE_SCALE[0].value, "pooling": "C", "value": self.baseline.scale},
            },
            "cells": [cell.to_dict() for cell in self.cells],
        }


def study_cells(config: ScenarioConfig) -> List[Cell]:
    """
    (estimator, pooling) cells evaluated for a configuration, in report order.

    Pooling D is kept only for SD and MAD, the two estimators it is defined for.
    """
    cells = []
    for estimator in sorted(set(config.estimators), key=ALL_ESTIMATORS.index):
        for pooling in config.poolings:
            if pooling is PoolingType.D and estimator not in (ScaleKind.STDDEV, ScaleKind.MAD):
                continue
            cells.append((estimator, pooling))
    return cells


def _kind(estimator: Estimator) -> str:
    return KIND_LOCATION if isinstance(estimator, LocationKind) else KIND_SCALE


class PooledEvaluator:
    """Evaluates pooled estimates of many cells on blocks of replications."""

    def __init__(self, sizes: Sequence[int], cells: Sequence[Cell], table: FactorTable):
        self.sizes = tuple(int(n) for n in sizes)
        self.offsets = np.concatenate([[0], np.cumsum(self.sizes)])
        self.cells = list(cells)
        self.total = int(self.offsets[-1])
        self.m = len(self.sizes)
        self.weights: Dict[Cell, np.ndarray] = {}
        self.mad_factor = 1.0
        for estimator, pooling in self.cells:
            if pooling is PoolingType.D:
                if estimator is ScaleKind.MAD:
                    self.mad_factor = table.gamma(ScaleKind.MAD, self.total)
                continue
            var_std = [table.var_std(estimator, n) for n in self.sizes]
            if isinstance(estimator, LocationKind):
                self.weights[(estimator, pooling)] = location_weights(pooling, self.sizes, var_std)
            else:
                gamma = [table.gamma(estimator, n) for n in self.sizes]
                self.weights[(estimator, pooling)] = scale_weights(pooling, gamma, var_std)

    def subgroups(self, data: np.ndarray) -> List[np.ndarray]:
        return [data[:, self.offsets[i]:self.offsets[i + 1]] for i in range(self.m)]

    def evaluate(self, data: np.ndarray) -> np.ndarray:
        """Pooled estimate of every cell; returns shape (replications, cells)."""
        parts = self.subgroups(data)
        per_subgroup: Dict[Estimator, np.ndarray] = {}
        columns = []
        for estimator, pooling in self.cells:
            if estimator not in per_subgroup:
                per_subgroup[estimator] = np.column_stack([batch_estimate(estimator, p) for p in parts])
            estimates = per_subgroup[estimator]
            if pooling is PoolingType.D:
                columns.append(self._pooled_data_scale(estimator, estimates, data))
            else:
                columns.append(estimates @ self.weights[(estimator, pooling)])
        return np.column_stack(columns)

    def _pooled_data_scale(self, estimator: Estimator, estimates: np.ndarray, data: np.ndarray) -> np.ndarray:
        if estimator is ScaleKind.STDDEV:
            degrees = np.asarray(self.sizes, dtype=float) - 1.0
            pooled = np.sqrt((estimates * estimates) @ degrees / (self.total - self.m))
            return pooled / c4(self.total - self.m + 1)
        center = np.median(data, axis=-1, keepdims=True)
        raw = np.median(np.abs(data - center), axis=-1) / NORMAL_Q3
        return raw / self.mad_factor


def phase1_block(
    streams: StreamFactory,
    start: int,
    stop: int,
    config: ScenarioConfig,
    contaminate: bool = True,
) -> np.ndarray:
    """
    Phase-I data of replications start..stop-1, one row per replication.

    Row ``r`` always comes from stream ``r``; contamination is applied to
    the configured column afterwards.
    """
    total = config.total_size
    data = np.empty((stop - start, total))
    for row, replication in enumerate(range(start, stop)):
        data[row] = streams.generator(replication).standard_normal(total)
    data = config.mu0 + config.sigma0 * data
    if contaminate and config.contamination is not None:
        data[:, config.contamination.column(config.sizes)] += config.contamination.delta
    return data


def _simulate(
    config: ScenarioConfig, cells: Sequence[Cell], table: FactorTable, contaminate: bool
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Bias, (0-denominator) variance and MSE per cell."""
    evaluator = PooledEvaluator(config.sizes, cells, table)
    targets = np.array([config.mu0 if _kind(e) == KIND_LOCATION else config.sigma0 for e, _ in cells])
    streams = StreamFactory(config.master_seed, TAG_PHASE1)
    bounds = block_bounds(config.replications, config.block_size)

    def run_block(index: int) -> Tuple[BlockMoments, BlockMoments]:
        start, stop = bounds[index]
        errors = evaluator.evaluate(phase1_block(streams, start, stop, config, contaminate)) - targets
        logger.debug(f"Efficiency block {index + 1}/{len(bounds)} done")
        return BlockMoments.of(errors), BlockMoments.of(errors * errors)

    results = map_ordered(run_block, range(len(bounds)), config.workers)
    errors = pairwise_merge([r[0] for r in results])
    squared = pairwise_merge([r[1] for r in results])
    return (
        np.atleast_1d(errors.mean),
        np.atleast_1d(errors.variance(ddof=0)),
        np.atleast_1d(squared.mean),
    )


def clean_baseline(config: ScenarioConfig, table: FactorTable) -> EfficiencyBaseline:
    """
    MSE of the BLUE mean and BLUE SD on the configuration's sizes without contamination.

    Uses the configuration's seed, so a clean study and its baseline see the
    same data.
    """
    _, _, mse = _simulate(config.clean(), [BASELINE_LOCATION, BASELINE_SCALE], table, contaminate=False)
    return EfficiencyBaseline(sizes=config.sizes, location=float(mse[0]), scale=float(mse[1]))


@recorded(name="simulation.efficiency_study")
def efficiency_study(
    config: ScenarioConfig,
    table: FactorTable,
    baseline: Optional[EfficiencyBaseline] = None,
) -> EfficiencyReport:
    """
    Variance, bias, MSE and relative efficiency of every (estimator, pooling) cell.

    On clean data RE is the variance ratio against the BLUE mean (location)
    or the BLUE SD (scale) of the same run. Under contamination RE is
    ``100 * MSE_baseline / MSE_cell`` where the baseline is the clean run.

    Args:
        config: Scenario
        table: Factor table covering every size (and the total size for pooled MAD)
        baseline: Precomputed clean baseline; computed from ``config`` when None

    Raises:
        InvalidInputError: If the baseline was computed for other sizes
        TableIncompleteError: If a needed factor is missing
    """
    if baseline is not None and tuple(baseline.sizes) != tuple(config.sizes):
        raise InvalidInputError(
            f"baseline sizes {list(baseline.sizes)} do not match configuration sizes {list(config.sizes)}"
        )
    cells = study_cells(config)
    evaluated = list(cells)
    for reference in (BASELINE_LOCATION, BASELINE_SCALE):
        if reference not in evaluated:
            evaluated.append(reference)

    logger.info(
        f"Efficiency study {config.label or list(config.sizes)}: {config.replications} replications, "
        f"seed={config.master_seed}, {len(cells)} cells, workers={config.workers}"
    )
    bias, variance, mse = _simulate(config, evaluated, table, contaminate=True)

    if baseline is None:
        if config.contamination is None:
            location_index = evaluated.index(BASELINE_LOCATION)
            scale_index = evaluated.index(BASELINE_SCALE)
            baseline = EfficiencyBaseline(
                sizes=config.sizes,
                location=float(variance[location_index]),
                scale=float(variance[scale_index]),
            )
        else:
            baseline = clean_baseline(config, table)

    contaminated = config.contamination is not None
    report_cells = []
    for index, (estimator, pooling) in enumerate(cells):
        kind = _kind(estimator)
        reference = baseline.location if kind == KIND_LOCATION else baseline.scale
        precision = mse[index] if contaminated else variance[index]
        report_cells.append(
            EfficiencyCell(
                estimator=estimator,
                pooling=pooling,
                kind=kind,
                variance=float(variance[index]),
                bias=float(bias[index]),
                mse=float(mse[index]),
                re_percent=float(100.0 * reference / precision) if precision > 0 else float("inf"),
                theoretical_variance=config.sigma0 ** 2
                * theoretical_variance_factor(estimator, pooling, config.sizes, table),
            )
        )
    return EfficiencyReport(
        config=config,
        baseline=baseline,
        cells=tuple(report_cells),
        factor_version=table.fingerprint,
    )
