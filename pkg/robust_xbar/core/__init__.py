"""Core value types, errors and random streams for robust_xbar."""

from robust_xbar.core.errors import (
    ConfigError,
    DataError,
    FactorTableError,
    InvalidInputError,
    RobustXbarError,
    TableIncompleteError,
    UnsupportedCombinationError,
)
from robust_xbar.core.streams import StreamFactory, block_bounds
from robust_xbar.core.types import (
    ALL_ESTIMATORS,
    LOCATION_KINDS,
    SCALE_KINDS,
    Estimator,
    LocationKind,
    ScaleKind,
    Subgroup,
    parse_estimator,
)

__all__ = [
    'ALL_ESTIMATORS',
    'LOCATION_KINDS',
    'SCALE_KINDS',
    'ConfigError',
    'DataError',
    'Estimator',
    'FactorTableError',
    'InvalidInputError',
    'LocationKind',
    'RobustXbarError',
    'ScaleKind',
    'StreamFactory',
    'Subgroup',
    'TableIncompleteError',
    'UnsupportedCombinationError',
    'block_bounds',
    'parse_estimator',
]
