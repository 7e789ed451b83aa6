"""In-memory storage backend for the provenance ledger."""

import threading
from typing import Any, Dict, List

from robust_xbar.ledger.events import LedgerArtifact, LedgerEvent
from robust_xbar.ledger.storage.base import LedgerStore


class InMemoryLedgerStore(LedgerStore):
    """
    Keeps every event and artifact in process memory.

    Useful for tests and one-shot CLI invocations; data is lost on exit.
    """

    def __init__(self) -> None:
        self.events: List[LedgerEvent] = []
        self.artifacts: List[LedgerArtifact] = []
        self._lock = threading.Lock()

    def save_event(self, event: LedgerEvent) -> str:
        with self._lock:
            self.events.append(event)
            return str(len(self.events))

    def save_artifact(self, artifact: LedgerArtifact) -> str:
        with self._lock:
            self.artifacts.append(artifact)
        return artifact.id

    def get_run(self, run_id: str) -> Dict[str, Any]:
        with self._lock:
            events = [e.to_dict() for e in self.events if e.run_id == run_id]
            artifacts = [a.to_dict() for a in self.artifacts if a.run_id == run_id]
        return {"run_id": run_id, "events": events, "artifacts": artifacts}

    def list_runs(self) -> List[Dict[str, Any]]:
        runs: Dict[str, Dict[str, Any]] = {}
        with self._lock:
            for event in self.events:
                if event.run_id not in runs:
                    runs[event.run_id] = {"run_id": event.run_id, "name": event.step_name}
        return list(runs.values())
