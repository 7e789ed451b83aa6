"""File cache of built factor tables."""

import hashlib
import logging
import os
import threading
from typing import Iterable, Optional, Sequence, Tuple

from robust_xbar.core.errors import FactorTableError, InvalidInputError
from robust_xbar.core.types import Estimator
from robust_xbar.factors.moments import DEFAULT_BLOCK_SIZE
from robust_xbar.factors.table import (
    FactorTable,
    analytic_moments_or_none,
    build_table,
    estimator_order,
    load_table,
    missing_entries,
    save_table,
)

logger = logging.getLogger("robust_xbar.factors.store")

CACHE_DIR_ENV = "SPC_CACHE_DIR"


def default_cache_dir() -> str:
    return os.environ.get(CACHE_DIR_ENV) or os.path.join(
        os.path.expanduser("~"), ".cache", "robust_xbar"
    )


class FactorTableStore:
    """
    A thread-safe file cache of built factor tables.

    Tables are keyed by everything that determines their content (estimators,
    size range, replications, seed and block size), so a cached file is reused
    only by a build that would have produced the same bytes.
    """

    def __init__(self, base_path: Optional[str] = None, namespace: str = "tables"):
        """
        Initialize the store.

        Args:
            base_path (str): Cache directory (``SPC_CACHE_DIR`` or ~/.cache/robust_xbar)
            namespace (str): Subdirectory segregating table formats
        """
        self.base_path = os.path.abspath(base_path or default_cache_dir())
        self.namespace = namespace
        self._lock = threading.Lock()
        os.makedirs(os.path.join(self.base_path, self.namespace), exist_ok=True)

    @staticmethod
    def key(
        estimators: Iterable[Estimator],
        n_range: Tuple[int, int],
        replications: int,
        seed: int,
        block_size: int = DEFAULT_BLOCK_SIZE,
    ) -> str:
        names = ",".join(e.value for e in sorted(set(estimators), key=estimator_order))
        spec = f"{names}|{n_range[0]}-{n_range[1]}|{replications}|{seed}"
        if block_size != DEFAULT_BLOCK_SIZE:
            spec += f"|{block_size}"
        return hashlib.sha256(spec.encode("utf-8")).hexdigest()[:24]

    def _get_file_path(self, key: str) -> str:
        safe_key = ''.join(c for c in key if c.isalnum() or c in '_-')
        return os.path.join(self.base_path, self.namespace, f"{safe_key}.json")

    def get(self, key: str) -> Optional[FactorTable]:
        """
        Load a cached table.

        Returns:
            The table, or None when absent or unreadable
        """
        file_path = self._get_file_path(key)
        with self._lock:
            if not os.path.exists(file_path):
                return None
            try:
                return load_table(file_path)
            except FactorTableError as e:
                logger.warning(f"Ignoring unusable cached factor table {file_path}: {e}")
                return None

    def set(self, key: str, table: FactorTable) -> str:
        file_path = self._get_file_path(key)
        with self._lock:
            save_table(table, file_path)
        return file_path

    def load_or_build(
        self,
        estimators: Iterable[Estimator],
        n_range: Tuple[int, int],
        replications: int,
        seed: int,
        workers: int = 1,
        block_size: int = DEFAULT_BLOCK_SIZE,
    ) -> FactorTable:
        """
        Return the cached table for these build arguments, building it on a miss.
        """
        estimators = tuple(estimators)
        key = self.key(estimators, n_range, replications, seed, block_size)
        table = self.get(key)
        if table is not None:
            logger.info(f"Using cached factor table {table.fingerprint}")
            return table
        logger.info(
            f"Building factor table n={n_range[0]}..{n_range[1]} "
            f"({replications} replications, seed={seed})"
        )
        table = build_table(
            estimators, n_range, replications, seed, workers=workers, block_size=block_size
        )
        path = self.set(key, table)
        logger.info(f"Cached factor table at {path}")
        return table

    def ensure_table(
        self,
        estimators: Iterable[Estimator],
        sizes: Iterable[int],
        replications: int,
        seed: int,
        workers: int = 1,
        extra: Sequence[Tuple[Estimator, int]] = (),
    ) -> FactorTable:
        """
        A table answering every estimator at every size in ``sizes`` plus the ``extra`` pairs.

        Estimators with closed forms need no entries. The simulated ones are
        built over min(sizes)..max(sizes); each extra pair outside that range
        is built alone and attached as a supplement.
        """
        sizes = sorted(set(int(n) for n in sizes))
        if not sizes:
            raise InvalidInputError("no subgroup sizes given")
        simulated = [e for e in dict.fromkeys(estimators) if analytic_moments_or_none(e, sizes[0]) is None]
        if simulated:
            table = self.load_or_build(simulated, (sizes[0], sizes[-1]), replications, seed, workers=workers)
        else:
            table = FactorTable(
                master_seed=seed, replications=0, estimators=(), n_min=sizes[0], n_max=sizes[-1]
            )
        missing = missing_entries(table, extra)
        if missing:
            logger.info(
                "Building supplementary factor entries: " + ", ".join(f"{e.value} n={n}" for e, n in missing)
            )
        supplements = [
            self.load_or_build((estimator,), (n, n), replications, seed, workers=workers)
            for estimator, n in missing
        ]
        return table.with_supplements(*supplements) if supplements else table
