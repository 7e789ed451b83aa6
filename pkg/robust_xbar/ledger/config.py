"""Ledger storage configuration."""

import logging
from typing import Any, Optional

from robust_xbar.ledger.storage.base import LedgerStore

logger = logging.getLogger("robust_xbar.ledger")

_ledger_store: Optional[LedgerStore] = None


def get_store() -> LedgerStore:
    """
    Get the configured ledger store.

    Falls back to an in-memory store when nothing was configured.
    """
    global _ledger_store
    if _ledger_store is None:
        from robust_xbar.ledger.storage.memory import InMemoryLedgerStore

        _ledger_store = InMemoryLedgerStore()
        logger.debug("No ledger store configured, using in-memory storage")
    return _ledger_store


def configure_ledger(store_type: str = "memory", **kwargs: Any) -> LedgerStore:
    """
    Configure the global ledger store.

    Args:
        store_type: "memory" or "sqlite"
        **kwargs: Backend arguments (``database_path`` for sqlite)

    Returns:
        The new store

    Raises:
        ValueError: If the store type is unknown
    """
    global _ledger_store
    if store_type == "memory":
        from robust_xbar.ledger.storage.memory import InMemoryLedgerStore

        _ledger_store = InMemoryLedgerStore()
    elif store_type == "sqlite":
        from robust_xbar.ledger.storage.sqlite import SQLiteLedgerStore

        _ledger_store = SQLiteLedgerStore(**kwargs)
    else:
        raise ValueError(f"Unknown ledger store type: {store_type}")
    logger.debug(f"Configured ledger with store type: {store_type}")
    return _ledger_store
