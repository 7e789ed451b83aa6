"""Single-observation contamination of Phase-I data."""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from robust_xbar.core.errors import InvalidInputError
from robust_xbar.core.types import Subgroup


@dataclass(frozen=True)
class ContaminationSpec:
    """
    Shift one observation by ``delta``.

    Indices are 1-based; ``observation_index=None`` means the last
    observation of the subgroup.
    """

    sample_index: int
    delta: float
    observation_index: Optional[int] = None

    def __post_init__(self) -> None:
        if self.sample_index < 1:
            raise InvalidInputError(f"sample index is 1-based, got {self.sample_index}")
        if self.observation_index is not None and self.observation_index < 1:
            raise InvalidInputError(f"observation index is 1-based, got {self.observation_index}")
        if not np.isfinite(self.delta):
            raise InvalidInputError(f"delta must be finite, got {self.delta!r}")

    def locate(self, sizes: Sequence[int]) -> Tuple[int, int]:
        """
        Resolve to 0-based (subgroup, observation) indices for these sizes.

        Raises:
            InvalidInputError: If an index is out of range
        """
        if self.sample_index > len(sizes):
            raise InvalidInputError(
                f"sample index {self.sample_index} out of range for {len(sizes)} subgroups"
            )
        n = sizes[self.sample_index - 1]
        observation = n if self.observation_index is None else self.observation_index
        if observation > n:
            raise InvalidInputError(
                f"observation index {observation} out of range for subgroup "
                f"{self.sample_index} of size {n}"
            )
        return self.sample_index - 1, observation - 1

    def column(self, sizes: Sequence[int]) -> int:
        """Column of the contaminated value when subgroups are laid side by side."""
        subgroup, observation = self.locate(sizes)
        return int(sum(sizes[:subgroup])) + observation


def inject_contamination(dataset: Sequence[Subgroup], spec: ContaminationSpec) -> List[Subgroup]:
    """
    Return a copy of ``dataset`` with one value shifted by ``spec.delta``.

    The input is left unchanged.

    Raises:
        InvalidInputError: If the indices are out of range
    """
    subgroup, observation = spec.locate([s.n for s in dataset])
    result = list(dataset)
    values = list(result[subgroup].values)
    values[observation] += spec.delta
    result[subgroup] = result[subgroup].with_values(values)
    return result


def append_observation(dataset: Sequence[Subgroup], sample_index: int, value: float) -> List[Subgroup]:
    """Return a copy of ``dataset`` with ``value`` appended to subgroup ``sample_index`` (1-based)."""
    if not 1 <= sample_index <= len(dataset):
        raise InvalidInputError(
            f"sample index {sample_index} out of range for {len(dataset)} subgroups"
        )
    result = list(dataset)
    target = result[sample_index - 1]
    result[sample_index - 1] = target.with_values(target.values + (float(value),))
    return result
