"""Tests for scenario configuration parsing."""

import json

import pytest

from robust_xbar.charts import Method
from robust_xbar.core.errors import ConfigError
from robust_xbar.core.types import LocationKind, ScaleKind
from robust_xbar.pooling import PoolingType
from robust_xbar.simulation import PLANS, SCENARIOS, load_config, parse_config_text

KEY_VALUE = """
# scenario (a) with one outlier
scenario = a
replications = 100_000
seed = 7
contamination.sample = 2
contamination.observation = last
contamination.delta = 100
"""


def test_presets():
    assert SCENARIOS["a"] == (3, 10, 17)
    assert SCENARIOS["d"] == (9, 10, 11)
    assert len(PLANS) == 5
    assert all(len(sizes) == 15 and sum(sizes) == 150 for sizes in PLANS.values())
    assert PLANS[1][:5] == (3,) * 5 and PLANS[1][-5:] == (17,) * 5


def test_key_value():
    config = parse_config_text(KEY_VALUE)
    assert config.sizes == (3, 10, 17)
    assert config.replications == 100_000
    assert config.master_seed == 7
    assert config.contamination.sample_index == 2
    assert config.contamination.observation_index is None
    assert config.contamination.delta == 100.0
    assert config.label == "scenario (a)"


def test_json_is_flattened():
    document = {
        "plan": 3,
        "sigma0": 5,
        "nk": 10,
        "methods": ["I", "III"],
        "poolings": "A,C",
        "contamination": {"sample": 15, "delta": 100},
    }
    config = parse_config_text(json.dumps(document))
    assert config.sizes == PLANS[3]
    assert config.sigma0 == 5.0
    assert config.methods == (Method.I, Method.III)
    assert config.poolings == (PoolingType.A, PoolingType.C)
    assert config.contamination.sample_index == 15


def test_estimator_names():
    config = parse_config_text("sizes = 4, 5\nestimators = mean, MAD, shamos\nhl_variant = HL3")
    assert config.estimators == (LocationKind.MEAN, ScaleKind.MAD, ScaleKind.SHAMOS)
    assert config.hl_variant is LocationKind.HL3


def test_unknown_key_reports_line():
    with pytest.raises(ConfigError) as info:
        parse_config_text("sizes = 3, 4\n\nreplicates = 10")
    assert info.value.line == 3
    assert info.value.field == "replicates"


def test_duplicate_key():
    with pytest.raises(ConfigError) as info:
        parse_config_text("sizes = 3, 4\nseed = 1\nseed = 2")
    assert info.value.line == 3


def test_bad_value():
    with pytest.raises(ConfigError) as info:
        parse_config_text("sizes = 3, 4\nreplications = many")
    assert (info.value.line, info.value.field) == (2, "replications")


def test_exactly_one_layout():
    with pytest.raises(ConfigError):
        parse_config_text("seed = 1")
    with pytest.raises(ConfigError):
        parse_config_text("sizes = 3, 4\nplan = 2")
    with pytest.raises(ConfigError):
        parse_config_text("scenario = z")


def test_contamination_out_of_range():
    with pytest.raises(ConfigError):
        parse_config_text("sizes = 3, 4\ncontamination.sample = 3\ncontamination.delta = 1")
    with pytest.raises(ConfigError):
        parse_config_text("sizes = 3, 4\ncontamination.sample = 1")


def test_invalid_settings():
    with pytest.raises(ConfigError):
        parse_config_text("sizes = 1, 4")
    with pytest.raises(ConfigError) as info:
        parse_config_text("sizes = 3, 4\nsigma0 = 0")
    assert info.value.line == 2


def test_invalid_json():
    with pytest.raises(ConfigError):
        parse_config_text('{"sizes": [3, 4],')


def test_load_config(tmp_path):
    path = tmp_path / "scenario.cfg"
    path.write_text(KEY_VALUE)
    assert load_config(path).sizes == (3, 10, 17)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.cfg")
