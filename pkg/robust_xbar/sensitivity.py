"""
Sensitivity of control limits to a single contaminated observation.

A grid of values delta is placed into the Phase-I data one at a time and the
limits of every selected method recomputed. In ``append`` mode delta is added
as a new observation of the target subgroup; in ``replace`` mode the target
observation is shifted by delta.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from robust_xbar.charts import DEFAULT_G, Method, control_limits, phase1_estimate
from robust_xbar.core.errors import InvalidInputError
from robust_xbar.core.types import LocationKind, Subgroup
from robust_xbar.factors.table import FactorTable
from robust_xbar.ledger import recorded
from robust_xbar.pooling import PoolingType
from robust_xbar.simulation.contamination import ContaminationSpec, append_observation, inject_contamination

logger = logging.getLogger("robust_xbar.sensitivity")

MODE_APPEND = "append"
MODE_REPLACE = "replace"


@dataclass(frozen=True)
class SensitivitySweepSpec:
    start: float
    stop: float
    step: float
    sample_index: int = 1
    observation_index: Optional[int] = None
    methods: Tuple[Method, ...] = tuple(Method)
    pooling: PoolingType = PoolingType.C
    mode: str = MODE_APPEND

    def __post_init__(self) -> None:
        if not self.step > 0:
            raise InvalidInputError(f"sweep step must be positive, got {self.step}")
        if self.start > self.stop:
            raise InvalidInputError(f"sweep start {self.start} exceeds stop {self.stop}")
        if not self.methods:
            raise InvalidInputError("select at least one method")
        if self.mode not in (MODE_APPEND, MODE_REPLACE):
            raise InvalidInputError(f"unknown sweep mode {self.mode!r}")
        if self.sample_index < 1:
            raise InvalidInputError(f"sample index is 1-based, got {self.sample_index}")

    def grid(self) -> np.ndarray:
        """start, start + step, ..., stop; the endpoint is kept despite round-off."""
        count = int(round((self.stop - self.start) / self.step)) + 1
        return np.round(self.start + self.step * np.arange(count), 12)


@dataclass(frozen=True)
class SweepRow:
    delta: float
    method: Method
    lcl: float
    cl: float
    ucl: float


@dataclass(frozen=True)
class LimitRange:
    lcl: float
    cl: float
    ucl: float


def contaminated_dataset(samples: Sequence[Subgroup], spec: SensitivitySweepSpec, delta: float) -> List[Subgroup]:
    if spec.mode == MODE_APPEND:
        return append_observation(samples, spec.sample_index, delta)
    contamination = ContaminationSpec(
        sample_index=spec.sample_index, observation_index=spec.observation_index, delta=delta
    )
    return inject_contamination(samples, contamination)


@recorded(name="sensitivity.sweep")
def sensitivity_sweep(
    samples: Sequence[Subgroup],
    spec: SensitivitySweepSpec,
    table: FactorTable,
    n_k: int = 5,
    g: float = DEFAULT_G,
    hl_variant: LocationKind = LocationKind.HL1,
) -> List[SweepRow]:
    """
    Limits of each selected method for every delta of the grid.

    Rows are ordered by delta, then by method.

    Raises:
        InvalidInputError: If the target subgroup or observation does not exist
        TableIncompleteError: If a contaminated subgroup size is not tabulated
    """
    rows = []
    for delta in spec.grid():
        dataset = contaminated_dataset(samples, spec, float(delta))
        for method in spec.methods:
            estimate = phase1_estimate(dataset, method, spec.pooling, table, hl_variant=hl_variant)
            limits = control_limits(estimate, n_k, g)
            rows.append(SweepRow(float(delta), method, limits.lcl, limits.cl, limits.ucl))
    logger.info(
        f"Swept {len(spec.grid())} values of delta ({spec.mode}) over "
        f"{', '.join('Method-' + m.value for m in spec.methods)}"
    )
    return rows


def limit_ranges(rows: Sequence[SweepRow]) -> Dict[Method, LimitRange]:
    """max - min of each limit over the sweep, per method."""
    ranges = {}
    for method in dict.fromkeys(row.method for row in rows):
        selected = [row for row in rows if row.method is method]
        ranges[method] = LimitRange(
            lcl=float(np.ptp([r.lcl for r in selected])),
            cl=float(np.ptp([r.cl for r in selected])),
            ucl=float(np.ptp([r.ucl for r in selected])),
        )
    return ranges
