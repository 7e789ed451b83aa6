"""
Factor tables: standardized moments per (estimator, n), built once and persisted.

A table document is JSON::

    {"version": ..., "master_seed": ..., "replications": ...,
     "estimators": [...], "n_min": ..., "n_max": ...,
     "entries": [{"estimator", "n", "gamma", "var_std", "source"}, ...],
     "checksum": "<sha256 of the canonical document without checksum>"}

Entries are ordered by estimator then n and floats are written in their
shortest round-trip form, so the same build always produces the same bytes.
"""

import hashlib
import json
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Optional, Tuple

from robust_xbar.core.errors import FactorTableError, InvalidInputError, TableIncompleteError
from robust_xbar.core.files import PathLike, atomic_write_text
from robust_xbar.core.types import ALL_ESTIMATORS, Estimator, LocationKind, ScaleKind, parse_estimator
from robust_xbar.factors.moments import (
    DEFAULT_BLOCK_SIZE,
    StandardMoments,
    analytic_moments,
    c4,
    simulate_standard_moments,
)
from robust_xbar.ledger import recorded

logger = logging.getLogger("robust_xbar.factors")

TABLE_VERSION = "robust-xbar-factors/1"

SOURCE_ANALYTIC = "analytic"
SOURCE_MONTE_CARLO = "monte_carlo"


@dataclass(frozen=True)
class FactorEntry:
    """Standardized moments of one estimator at one subgroup size."""

    estimator: Estimator
    n: int
    gamma: float
    var_std: float
    source: str

    def to_dict(self) -> Dict[str, object]:
        return {
            "estimator": self.estimator.value,
            "n": self.n,
            "gamma": self.gamma,
            "var_std": self.var_std,
            "source": self.source,
        }


def estimator_order(estimator: Estimator) -> int:
    return ALL_ESTIMATORS.index(estimator)


@dataclass(frozen=True)
class FactorTable:
    """
    Immutable collection of factor entries with its provenance.

    Lookups for the mean and the standard deviation fall back to their
    closed forms, so a table only has to hold Monte-Carlo entries for the
    estimators that need them.
    """

    master_seed: int
    replications: int
    estimators: Tuple[Estimator, ...]
    n_min: int
    n_max: int
    entries: Dict[Tuple[Estimator, int], FactorEntry] = field(default_factory=dict)
    version: str = TABLE_VERSION
    supplements: Tuple["FactorTable", ...] = field(default=(), compare=False)

    def with_supplements(self, *tables: "FactorTable") -> "FactorTable":
        """
        A copy that also answers lookups from ``tables``, consulted in order.

        Supplements are not written by ``save_table``; they let a single
        extra entry (such as MAD at the total size of a dataset) join a
        table built over a range of subgroup sizes.
        """
        return replace(self, supplements=self.supplements + tuple(tables))

    def _find(self, estimator: Estimator, n: int) -> Optional[FactorEntry]:
        entry = self.entries.get((estimator, n))
        if entry is not None:
            return entry
        for table in self.supplements:
            entry = table._find(estimator, n)
            if entry is not None:
                return entry
        return None

    def covers(self, estimator: Estimator, n: int) -> bool:
        return self._find(estimator, n) is not None or analytic_moments_or_none(estimator, n) is not None

    def lookup(self, estimator: Estimator, n: int) -> FactorEntry:
        """
        Get the entry of (estimator, n).

        Raises:
            TableIncompleteError: If the table holds no entry and no closed form exists
        """
        entry = self._find(estimator, n)
        if entry is not None:
            return entry
        moments = analytic_moments_or_none(estimator, n)
        if moments is None:
            raise TableIncompleteError(
                estimator.value,
                n,
                f"table covers n={self.n_min}..{self.n_max}; rebuild it with `robust-xbar factors`",
            )
        return FactorEntry(estimator, n, moments.gamma, moments.var_std, SOURCE_ANALYTIC)

    def gamma(self, estimator: Estimator, n: int) -> float:
        return self.lookup(estimator, n).gamma

    def var_std(self, estimator: Estimator, n: int) -> float:
        return self.lookup(estimator, n).var_std

    def squared_factor_ratio(self, estimator: ScaleKind, n: int) -> float:
        """gamma^2 / tau^2 of a scale estimator at size n."""
        if not isinstance(estimator, ScaleKind):
            raise InvalidInputError(f"{estimator.value} is not a scale estimator")
        entry = self.lookup(estimator, n)
        return entry.gamma * entry.gamma / entry.var_std

    def sorted_entries(self) -> List[FactorEntry]:
        return sorted(self.entries.values(), key=lambda e: (estimator_order(e.estimator), e.n))

    @property
    def checksum(self) -> str:
        return _checksum(self._body())

    @property
    def fingerprint(self) -> str:
        """Short identifier of this exact table, recorded with every estimate."""
        own = f"{self.version}:{self.checksum[:12]}"
        return "+".join([own] + [t.checksum[:12] for t in self.supplements])

    def _body(self) -> Dict[str, object]:
        return {
            "version": self.version,
            "master_seed": self.master_seed,
            "replications": self.replications,
            "estimators": [e.value for e in sorted(self.estimators, key=estimator_order)],
            "n_min": self.n_min,
            "n_max": self.n_max,
            "entries": [entry.to_dict() for entry in self.sorted_entries()],
        }

    def to_document(self) -> Dict[str, object]:
        body = self._body()
        body["checksum"] = _checksum(body)
        return body

    def monotonicity_violations(self) -> List[Tuple[Estimator, int]]:
        """
        (estimator, n) pairs where var_std fails to decrease.

        Median and MAD are compared within odd and within even n only, since
        their variances alternate between the two.
        """
        violations = []
        for estimator in self.estimators:
            step = 2 if estimator in (LocationKind.MEDIAN, ScaleKind.MAD) else 1
            for n in range(self.n_min, self.n_max + 1 - step):
                a = self.entries.get((estimator, n))
                b = self.entries.get((estimator, n + step))
                if a is not None and b is not None and not b.var_std < a.var_std:
                    violations.append((estimator, n + step))
        return violations


def analytic_moments_or_none(estimator: Estimator, n: int) -> Optional[StandardMoments]:
    try:
        return analytic_moments(estimator, n)
    except InvalidInputError:
        return None


def _checksum(body: Dict[str, object]) -> str:
    canonical = json.dumps(body, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def unbiasing_factor(estimator: ScaleKind, n: int, table: Optional[FactorTable] = None) -> float:
    """
    Expectation of a scale estimator at N(0, 1): c4 for SD, c5 for MAD, c6 for Shamos.

    Args:
        estimator: Scale estimator
        n: Subgroup size
        table: Factor table holding the Monte-Carlo factors

    Raises:
        TableIncompleteError: If the factor is neither analytic nor tabulated
    """
    if not isinstance(estimator, ScaleKind):
        raise InvalidInputError(f"{estimator.value} is not a scale estimator")
    if estimator is ScaleKind.STDDEV:
        return c4(n)
    if table is None:
        raise TableIncompleteError(estimator.value, n, "no factor table given")
    return table.gamma(estimator, n)


@recorded(name="factors.build_table")
def build_table(
    estimators: Iterable[Estimator],
    n_range: Tuple[int, int],
    replications: int,
    seed: int,
    workers: int = 1,
    block_size: int = DEFAULT_BLOCK_SIZE,
) -> FactorTable:
    """
    Compute every (estimator, n) entry over an inclusive range of sizes.

    Closed forms are used for the mean and the standard deviation; all other
    estimators are simulated with ``simulate_standard_moments``.

    Args:
        estimators: Estimators to tabulate
        n_range: Inclusive (n_min, n_max), n_min >= 2
        replications: Monte-Carlo replications per entry
        seed: Master seed
        workers: Threads per simulation
        block_size: Draws per simulation block

    Returns:
        The new FactorTable
    """
    n_min, n_max = n_range
    if n_min < 2 or n_min > n_max:
        raise InvalidInputError(f"invalid size range {n_min}..{n_max}; need 2 <= n_min <= n_max")
    chosen = tuple(sorted(set(estimators), key=estimator_order))
    if not chosen:
        raise InvalidInputError("no estimators selected")

    entries: Dict[Tuple[Estimator, int], FactorEntry] = {}
    for estimator in chosen:
        for n in range(n_min, n_max + 1):
            moments = analytic_moments(estimator, n)
            source = SOURCE_ANALYTIC
            if moments is None:
                moments = simulate_standard_moments(
                    estimator, n, replications, seed, workers=workers, block_size=block_size
                )
                source = SOURCE_MONTE_CARLO
            entries[(estimator, n)] = FactorEntry(estimator, n, moments.gamma, moments.var_std, source)
        logger.info(f"Tabulated {estimator.value} for n={n_min}..{n_max}")

    table = FactorTable(
        master_seed=seed,
        replications=replications,
        estimators=chosen,
        n_min=n_min,
        n_max=n_max,
        entries=entries,
    )
    for estimator, n in table.monotonicity_violations():
        logger.warning(f"var_std of {estimator.value} does not decrease at n={n}")
    return table


def dumps_table(table: FactorTable) -> str:
    return json.dumps(table.to_document(), indent=2) + "\n"


def save_table(table: FactorTable, path: PathLike) -> None:
    """Write a table atomically."""
    try:
        atomic_write_text(path, dumps_table(table))
    except OSError as e:
        raise FactorTableError(f"cannot write factor table {path}: {e}") from e
    logger.info(f"Saved factor table with {len(table.entries)} entries to {path}")


def table_from_document(document: Dict[str, object], origin: str = "<document>") -> FactorTable:
    """
    Rebuild a table from its JSON document.

    Checks, in order: version, completeness over the declared estimators and
    size range, then the checksum.

    Raises:
        FactorTableError: On version or checksum mismatch or malformed content
        TableIncompleteError: If a declared (estimator, n) entry is missing
    """
    version = document.get("version")
    if version != TABLE_VERSION:
        raise FactorTableError(f"{origin}: unsupported factor table version {version!r}")
    try:
        estimators = tuple(parse_estimator(str(name)) for name in document["estimators"])
        n_min = int(document["n_min"])
        n_max = int(document["n_max"])
        entries: Dict[Tuple[Estimator, int], FactorEntry] = {}
        for raw in document["entries"]:
            entry = FactorEntry(
                estimator=parse_estimator(str(raw["estimator"])),
                n=int(raw["n"]),
                gamma=float(raw["gamma"]),
                var_std=float(raw["var_std"]),
                source=str(raw["source"]),
            )
            entries[(entry.estimator, entry.n)] = entry
        table = FactorTable(
            master_seed=int(document["master_seed"]),
            replications=int(document["replications"]),
            estimators=estimators,
            n_min=n_min,
            n_max=n_max,
            entries=entries,
        )
    except (KeyError, TypeError, ValueError) as e:
        raise FactorTableError(f"{origin}: malformed factor table: {e}") from e

    for estimator in estimators:
        for n in range(n_min, n_max + 1):
            if (estimator, n) not in entries:
                raise TableIncompleteError(estimator.value, n, f"missing from {origin}")
    for entry in entries.values():
        if not (math.isfinite(entry.gamma) and math.isfinite(entry.var_std)):
            raise FactorTableError(f"{origin}: non-finite moments for ({entry.estimator.value}, n={entry.n})")

    if document.get("checksum") != table.checksum:
        raise FactorTableError(f"{origin}: checksum mismatch, the file was modified after it was built")
    return table


def load_table(path: PathLike) -> FactorTable:
    """
    Read and validate a table file.

    Raises:
        FactorTableError: If the file is unreadable, of another version or corrupted
        TableIncompleteError: If a declared entry is missing
    """
    try:
        with open(path, "r", encoding="utf-8") as handle:
            document = json.load(handle)
    except (OSError, ValueError) as e:
        raise FactorTableError(f"cannot read factor table {path}: {e}") from e
    if not isinstance(document, dict):
        raise FactorTableError(f"{path}: a factor table must be a JSON object")
    table = table_from_document(document, origin=str(path))
    logger.debug(f"Loaded factor table {table.fingerprint} from {path}")
    return table


def missing_entries(
    table: FactorTable, pairs: Iterable[Tuple[Estimator, int]]
) -> List[Tuple[Estimator, int]]:
    """The (estimator, n) pairs, deduplicated in order, that ``table`` cannot answer."""
    return [(e, int(n)) for e, n in dict.fromkeys(pairs) if not table.covers(e, int(n))]
