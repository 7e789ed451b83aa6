"""Unbiasing factors and standardized variances of the estimators."""

from robust_xbar.factors.moments import (
    StandardMoments,
    analytic_moments,
    c4,
    simulate_standard_moments,
    standard_error,
)
from robust_xbar.factors.store import FactorTableStore, default_cache_dir
from robust_xbar.factors.table import (
    TABLE_VERSION,
    FactorEntry,
    FactorTable,
    build_table,
    load_table,
    save_table,
    unbiasing_factor,
)

__all__ = [
    'TABLE_VERSION',
    'FactorEntry',
    'FactorTable',
    'FactorTableStore',
    'StandardMoments',
    'analytic_moments',
    'build_table',
    'c4',
    'default_cache_dir',
    'load_table',
    'save_table',
    'simulate_standard_moments',
    'standard_error',
    'unbiasing_factor',
]
