"""Monte-Carlo efficiency and run-length studies."""

from robust_xbar.simulation.config import (
    PLANS,
    SCENARIOS,
    ScenarioConfig,
    config_from_mapping,
    load_config,
    parse_config_text,
)
from robust_xbar.simulation.contamination import (
    ContaminationSpec,
    append_observation,
    inject_contamination,
)
from robust_xbar.simulation.efficiency import (
    EfficiencyBaseline,
    EfficiencyCell,
    EfficiencyReport,
    clean_baseline,
    efficiency_study,
)
from robust_xbar.simulation.run_length import (
    RunLengthReport,
    RunLengthSummary,
    fixed_limits_study,
    run_length_grid,
    run_length_study,
    summarize_run_lengths,
)

__all__ = [
    'PLANS',
    'SCENARIOS',
    'ContaminationSpec',
    'EfficiencyBaseline',
    'EfficiencyCell',
    'EfficiencyReport',
    'RunLengthReport',
    'RunLengthSummary',
    'ScenarioConfig',
    'append_observation',
    'clean_baseline',
    'config_from_mapping',
    'efficiency_study',
    'fixed_limits_study',
    'inject_contamination',
    'load_config',
    'parse_config_text',
    'run_length_grid',
    'run_length_study',
    'summarize_run_lengths',
]
