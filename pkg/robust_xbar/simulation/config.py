"""
Scenario configuration for simulation campaigns.

A configuration is either a JSON object or ``key = value`` text::

    # scenario (a) with one outlier
    scenario = a
    replications = 100000
    seed = 7
    contamination.sample = 2
    contamination.observation = last
    contamination.delta = 100

Nested JSON objects are flattened to the same dotted keys.
"""

import json
import logging
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, Mapping, Optional, Tuple

from robust_xbar.charts import DEFAULT_G, Method
from robust_xbar.core.errors import ConfigError, RobustXbarError
from robust_xbar.core.files import PathLike
from robust_xbar.core.types import ALL_ESTIMATORS, Estimator, LocationKind, parse_estimator
from robust_xbar.factors.moments import DEFAULT_BLOCK_SIZE
from robust_xbar.pooling import PoolingType
from robust_xbar.simulation.contamination import ContaminationSpec

logger = logging.getLogger("robust_xbar.simulation")

# Three subgroups per efficiency scenario.
SCENARIOS: Dict[str, Tuple[int, ...]] = {
    "a": (3, 10, 17),
    "b": (5, 10, 15),
    "c": (7, 10, 13),
    "d": (9, 10, 11),
}

# Fifteen subgroups per run-length plan: five small, five of ten, five large.
PLANS: Dict[int, Tuple[int, ...]] = {
    plan: (small,) * 5 + (10,) * 5 + (large,) * 5
    for plan, (small, large) in {1: (3, 17), 2: (5, 15), 3: (7, 13), 4: (9, 11), 5: (10, 10)}.items()
}

PHASE2_GEOMETRIC = "geometric"
PHASE2_SUBGROUPS = "subgroups"


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything that determines the output of a simulation campaign."""

    sizes: Tuple[int, ...]
    mu0: float = 100.0
    sigma0: float = 10.0
    replications: int = 100_000
    master_seed: int = 12345
    workers: int = 1
    contamination: Optional[ContaminationSpec] = None
    estimators: Tuple[Estimator, ...] = ALL_ESTIMATORS
    methods: Tuple[Method, ...] = tuple(Method)
    poolings: Tuple[PoolingType, ...] = (PoolingType.A, PoolingType.B, PoolingType.C)
    n_k: int = 10
    g: float = DEFAULT_G
    rl_cap: int = 10_000_000
    percentile: float = 99.0
    phase2_mode: str = PHASE2_GEOMETRIC
    hl_variant: LocationKind = LocationKind.HL1
    factors: Optional[str] = None
    factor_replications: int = 1_000_000
    factor_seed: int = 42
    block_size: int = DEFAULT_BLOCK_SIZE
    label: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if not self.sizes:
            raise ConfigError("at least one subgroup size is required", field="sizes")
        if any(n < 2 for n in self.sizes):
            raise ConfigError(f"every subgroup size must be >= 2, got {list(self.sizes)}", field="sizes")
        if self.replications < 1:
            raise ConfigError(f"replications must be >= 1, got {self.replications}", field="replications")
        if self.master_seed < 0:
            raise ConfigError("seed must be non-negative", field="seed")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1", field="workers")
        if not self.sigma0 > 0:
            raise ConfigError(f"sigma0 must be positive, got {self.sigma0}", field="sigma0")
        if self.n_k < 1:
            raise ConfigError("nk must be >= 1", field="nk")
        if not self.g > 0:
            raise ConfigError("g must be positive", field="g")
        if self.rl_cap < 1:
            raise ConfigError("rl_cap must be >= 1", field="rl_cap")
        if not 0.0 <= self.percentile <= 100.0:
            raise ConfigError("percentile must lie in [0, 100]", field="percentile")
        if self.phase2_mode not in (PHASE2_GEOMETRIC, PHASE2_SUBGROUPS):
            raise ConfigError(
                f"phase2_mode must be {PHASE2_GEOMETRIC!r} or {PHASE2_SUBGROUPS!r}", field="phase2_mode"
            )
        if self.block_size < 1:
            raise ConfigError("block_size must be >= 1", field="block_size")
        if not (self.estimators and self.methods and self.poolings):
            raise ConfigError("estimators, methods and poolings must not be empty")
        if self.contamination is not None:
            try:
                self.contamination.locate(self.sizes)
            except RobustXbarError as e:
                raise ConfigError(str(e), field="contamination") from e

    @property
    def total_size(self) -> int:
        return sum(self.sizes)

    def clean(self) -> "ScenarioConfig":
        """The same configuration without contamination."""
        return replace(self, contamination=None)

    def describe(self) -> Dict[str, Any]:
        """JSON-ready summary recorded in every report."""
        contamination = None
        if self.contamination is not None:
            contamination = {
                "sample": self.contamination.sample_index,
                "observation": self.contamination.observation_index or "last",
                "delta": self.contamination.delta,
            }
        return {
            "label": self.label,
            "sizes": list(self.sizes),
            "mu0": self.mu0,
            "sigma0": self.sigma0,
            "replications": self.replications,
            "seed": self.master_seed,
            "contamination": contamination,
            "nk": self.n_k,
            "g": self.g,
            "rl_cap": self.rl_cap,
            "percentile": self.percentile,
            "phase2_mode": self.phase2_mode,
            "block_size": self.block_size,
        }


def _sizes(value: Any) -> Tuple[int, ...]:
    if isinstance(value, str):
        value = [part for part in value.replace(";", ",").split(",") if part.strip()]
    return tuple(int(v) for v in value)


def _names(value: Any) -> Tuple[str, ...]:
    if isinstance(value, str):
        value = [part.strip() for part in value.split(",") if part.strip()]
    return tuple(str(v) for v in value)


def _observation(value: Any) -> Optional[int]:
    if isinstance(value, str) and value.strip().lower() == "last":
        return None
    return int(value)


def _integer(value: Any) -> int:
    if isinstance(value, float):
        if not value.is_integer():
            raise ValueError(f"expected an integer, got {value!r}")
        return int(value)
    return int(str(value).replace("_", "")) if isinstance(value, str) else int(value)


_FIELDS: Dict[str, Tuple[str, Callable[[Any], Any]]] = {
    "mu0": ("mu0", float),
    "sigma0": ("sigma0", float),
    "replications": ("replications", _integer),
    "seed": ("master_seed", _integer),
    "workers": ("workers", _integer),
    "nk": ("n_k", _integer),
    "g": ("g", float),
    "rl_cap": ("rl_cap", _integer),
    "percentile": ("percentile", float),
    "phase2_mode": ("phase2_mode", lambda v: str(v).strip().lower()),
    "hl_variant": ("hl_variant", lambda v: LocationKind.parse(str(v))),
    "factors": ("factors", str),
    "factor_replications": ("factor_replications", _integer),
    "factor_seed": ("factor_seed", _integer),
    "block_size": ("block_size", _integer),
    "label": ("label", str),
    "estimators": ("estimators", lambda v: tuple(parse_estimator(n) for n in _names(v))),
    "methods": ("methods", lambda v: tuple(Method.parse(n) for n in _names(v))),
    "poolings": ("poolings", lambda v: tuple(PoolingType.parse(n) for n in _names(v))),
}

_LAYOUT_KEYS = ("sizes", "plan", "scenario")
_CONTAMINATION_KEYS = ("contamination.sample", "contamination.observation", "contamination.delta")


def config_from_mapping(values: Mapping[str, Any], lines: Optional[Mapping[str, int]] = None) -> ScenarioConfig:
    """
    Build a ScenarioConfig from flat dotted keys.

    Args:
        values: Key to raw value
        lines: Key to the 1-based line it came from, for diagnostics

    Raises:
        ConfigError: On unknown keys, unparsable values or invalid settings
    """
    lines = lines or {}

    def fail(key: str, message: str) -> ConfigError:
        return ConfigError(message, line=lines.get(key), field=key)

    known = set(_FIELDS) | set(_LAYOUT_KEYS) | set(_CONTAMINATION_KEYS)
    for key in values:
        if key not in known:
            raise fail(key, f"unknown key {key!r}")

    layout = [key for key in _LAYOUT_KEYS if key in values]
    if len(layout) != 1:
        raise ConfigError(
            "exactly one of 'sizes', 'plan' or 'scenario' is required"
            + (f", got {', '.join(layout)}" if layout else ""),
            line=lines.get(layout[1]) if len(layout) > 1 else None,
            field="sizes",
        )
    key = layout[0]
    try:
        if key == "sizes":
            sizes = _sizes(values[key])
            label = ""
        elif key == "plan":
            plan = _integer(values[key])
            sizes, label = PLANS[plan], f"Plan-{plan}"
        else:
            name = str(values[key]).strip().lower()
            sizes, label = SCENARIOS[name], f"scenario ({name})"
    except (KeyError, TypeError, ValueError):
        raise fail(key, f"invalid value {values[key]!r}") from None

    kwargs: Dict[str, Any] = {"sizes": sizes, "label": label}
    for key, raw in values.items():
        if key not in _FIELDS:
            continue
        name, convert = _FIELDS[key]
        try:
            kwargs[name] = convert(raw)
        except (TypeError, ValueError, RobustXbarError) as e:
            raise fail(key, f"invalid value {raw!r}: {e}") from None

    if any(k in values for k in _CONTAMINATION_KEYS):
        for required in ("contamination.sample", "contamination.delta"):
            if required not in values:
                raise ConfigError(f"missing {required!r}", field=required)
        try:
            kwargs["contamination"] = ContaminationSpec(
                sample_index=_integer(values["contamination.sample"]),
                observation_index=_observation(values.get("contamination.observation", "last")),
                delta=float(values["contamination.delta"]),
            )
        except (TypeError, ValueError, RobustXbarError) as e:
            raise ConfigError(f"invalid contamination: {e}", field="contamination") from None

    try:
        return ScenarioConfig(**kwargs)
    except ConfigError as e:
        if e.line is None and e.field in lines:
            raise ConfigError(e.detail, line=lines[e.field], field=e.field) from None
        raise


def _flatten(document: Mapping[str, Any], prefix: str = "") -> Dict[str, Any]:
    flat: Dict[str, Any] = {}
    for key, value in document.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, prefix=f"{name}."))
        else:
            flat[name] = value
    return flat


def parse_config_text(text: str) -> ScenarioConfig:
    """
    Parse a configuration document, JSON or ``key = value``.

    Raises:
        ConfigError: With the offending line and field
    """
    if text.lstrip().startswith("{"):
        try:
            document = json.loads(text)
        except ValueError as e:
            raise ConfigError(f"invalid JSON: {e}", line=getattr(e, "lineno", None)) from None
        return config_from_mapping(_flatten(document))

    values: Dict[str, Any] = {}
    lines: Dict[str, int] = {}
    for number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw_line.strip()!r}", line=number)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError("empty key", line=number)
        if key in values:
            raise ConfigError(f"duplicate key (first set on line {lines[key]})", line=number, field=key)
        values[key] = value
        lines[key] = number
    return config_from_mapping(values, lines)


def load_config(path: PathLike) -> ScenarioConfig:
    """Read and parse a configuration file."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e}") from e
    config = parse_config_text(text)
    logger.debug(f"Loaded configuration from {path}: {config.describe()}")
    return config
