"""
Provenance ledger.

Library operations record themselves as steps of a run (start, end, error
and progress events, plus artifacts) so every report can be traced back to
its seeds and inputs.
"""

from robust_xbar.ledger.config import configure_ledger, get_store
from robust_xbar.ledger.context import RunContext
from robust_xbar.ledger.decorators import recorded
from robust_xbar.ledger.events import LedgerArtifact, LedgerEvent, json_safe
from robust_xbar.ledger.span import LedgerStep, step

__all__ = [
    'LedgerArtifact',
    'LedgerEvent',
    'LedgerStep',
    'RunContext',
    'configure_ledger',
    'get_store',
    'json_safe',
    'recorded',
    'step',
]
