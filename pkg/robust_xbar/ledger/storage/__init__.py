"""Storage backends for the provenance ledger."""

from robust_xbar.ledger.storage.base import LedgerStore
from robust_xbar.ledger.storage.memory import InMemoryLedgerStore
from robust_xbar.ledger.storage.sqlite import SQLiteLedgerStore

__all__ = ['LedgerStore', 'InMemoryLedgerStore', 'SQLiteLedgerStore']
