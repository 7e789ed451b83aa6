"""Value types shared by every robust_xbar module."""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Tuple, Union

import numpy as np

from robust_xbar.core.errors import InvalidInputError


class LocationKind(Enum):
    """Per-subgroup location estimators."""

    MEAN = "mean"
    MEDIAN = "median"
    HL1 = "HL1"
    HL2 = "HL2"
    HL3 = "HL3"

    @classmethod
    def parse(cls, name: str) -> "LocationKind":
        for kind in cls:
            if kind.value.lower() == name.strip().lower():
                return kind
        if name.strip().lower() == "hl":
            return cls.HL1
        raise InvalidInputError(f"unknown location estimator: {name!r}")

    @property
    def is_hodges_lehmann(self) -> bool:
        return self in (LocationKind.HL1, LocationKind.HL2, LocationKind.HL3)


class ScaleKind(Enum):
    """Per-subgroup scale estimators."""

    STDDEV = "SD"
    MAD = "MAD"
    SHAMOS = "Shamos"

    @classmethod
    def parse(cls, name: str) -> "ScaleKind":
        key = name.strip().lower()
        if key in ("sd", "std", "stddev", "std_dev"):
            return cls.STDDEV
        for kind in cls:
            if kind.value.lower() == key:
                return kind
        raise InvalidInputError(f"unknown scale estimator: {name!r}")


Estimator = Union[LocationKind, ScaleKind]

LOCATION_KINDS: Tuple[LocationKind, ...] = tuple(LocationKind)
SCALE_KINDS: Tuple[ScaleKind, ...] = tuple(ScaleKind)
ALL_ESTIMATORS: Tuple[Estimator, ...] = LOCATION_KINDS + SCALE_KINDS


def parse_estimator(name: str) -> Estimator:
    """
    Resolve an estimator name of either kind.

    Args:
        name: Estimator name as written in files and flags ("median", "SD", ...)

    Returns:
        The matching LocationKind or ScaleKind

    Raises:
        InvalidInputError: If the name matches no estimator
    """
    try:
        return LocationKind.parse(name)
    except InvalidInputError:
        pass
    try:
        return ScaleKind.parse(name)
    except InvalidInputError:
        raise InvalidInputError(f"unknown estimator: {name!r}") from None


@dataclass(frozen=True)
class Subgroup:
    """
    One Phase-I sample: an identifier and its ordered measurements.

    Values are stored as a tuple of finite floats; NaN and infinities are
    rejected at construction.
    """

    id: str
    values: Tuple[float, ...]

    def __post_init__(self) -> None:
        values = tuple(float(v) for v in self.values)
        for value in values:
            if not math.isfinite(value):
                raise InvalidInputError(
                    f"subgroup {self.id!r} contains a non-finite value: {value!r}"
                )
        object.__setattr__(self, "values", values)

    @classmethod
    def of(cls, id: str, values: Iterable[float]) -> "Subgroup":
        return cls(id=str(id), values=tuple(values))

    @property
    def n(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    def with_values(self, values: Iterable[float]) -> "Subgroup":
        return Subgroup(id=self.id, values=tuple(values))
