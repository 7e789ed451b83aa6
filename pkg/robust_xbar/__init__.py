"""
robust_xbar: robust X-bar control charts for Phase-I subgroups of unequal sizes

Per-subgroup location and scale estimates (mean/SD, median/MAD, or
Hodges-Lehmann/Shamos) are pooled with best linear unbiased weights, and a
deterministic Monte-Carlo engine measures the efficiency of the estimators
and the run-length behaviour of the resulting charts.
"""

import logging

logger = logging.getLogger("robust_xbar")

from robust_xbar.charts import (  # noqa: E402
    ControlLimits,
    Method,
    PhaseIEstimate,
    control_limits,
    monitor,
    phase1_estimate,
    signal_probability,
)
from robust_xbar.core import (  # noqa: E402
    LocationKind,
    RobustXbarError,
    ScaleKind,
    Subgroup,
)
from robust_xbar.factors import (  # noqa: E402
    FactorTable,
    build_table,
    c4,
    load_table,
    save_table,
    simulate_standard_moments,
    unbiasing_factor,
)
from robust_xbar.pooling import PooledEstimate, PoolingType, pool_location, pool_scale  # noqa: E402

__version__ = "0.1.0"

__all__ = [
    'ControlLimits',
    'FactorTable',
    'LocationKind',
    'Method',
    'PhaseIEstimate',
    'PooledEstimate',
    'PoolingType',
    'RobustXbarError',
    'ScaleKind',
    'Subgroup',
    'build_table',
    'c4',
    'control_limits',
    'load_table',
    'monitor',
    'phase1_estimate',
    'pool_location',
    'pool_scale',
    'save_table',
    'signal_probability',
    'simulate_standard_moments',
    'unbiasing_factor',
]
