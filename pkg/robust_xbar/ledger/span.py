"""Ledger steps: context managers recording a block of work."""

import time
import uuid
from typing import Any, Dict, Optional

from robust_xbar.ledger.config import get_store
from robust_xbar.ledger.context import RunContext
from robust_xbar.ledger.events import LedgerArtifact, LedgerEvent, json_safe


class LedgerStep:
    """
    Context manager for one step of a run.

    Entering records a ``start`` event and makes the step the parent of any
    nested step; leaving records ``end`` (or ``error``) and restores the
    previous context.
    """

    def __init__(
        self,
        name: str,
        run_id: Optional[str] = None,
        attributes: Optional[Dict[str, Any]] = None,
    ):
        """
        Initialize a step.

        Args:
            name: Name for this step
            run_id: ID of the run (current run, or a new one when None)
            attributes: JSON-safe attributes recorded with the start event
        """
        self.previous_run_id = RunContext.get_current_run_id()
        self.previous_parent_id = RunContext.get_current_parent_id()
        self.run_id = run_id or self.previous_run_id or str(uuid.uuid4())
        self.parent_id = self.previous_parent_id if self.run_id == self.previous_run_id else None
        self.step_id = str(uuid.uuid4())
        self.name = name
        self.attributes = json_safe(attributes or {})

    def _record(self, event_type: str, data: Dict[str, Any]) -> None:
        get_store().save_event(
            LedgerEvent(
                run_id=self.run_id,
                step_id=self.step_id,
                parent_id=self.parent_id,
                step_name=self.name,
                event_type=event_type,
                timestamp=time.time(),
                data=data,
            )
        )

    def __enter__(self) -> "LedgerStep":
        RunContext.set_current_run_id(self.run_id)
        RunContext.set_current_parent_id(self.step_id)
        self._record("start", {"attributes": self.attributes})
        return self

    def __exit__(self, exc_type, exc_val, exc_tb) -> None:
        try:
            if exc_type is not None:
                self._record("error", {"error": str(exc_val), "error_type": exc_type.__name__})
            else:
                self._record("end", {})
        finally:
            RunContext.set_current_run_id(self.previous_run_id)
            RunContext.set_current_parent_id(self.previous_parent_id)

    def add_event(self, name: str, attributes: Optional[Dict[str, Any]] = None) -> None:
        """
        Record a custom event on this step.

        Args:
            name: Event type, e.g. "progress"
            attributes: Payload, converted with ``json_safe``
        """
        data: Dict[str, Any] = {"event_name": name}
        if attributes:
            data["attributes"] = json_safe(attributes)
        self._record(name, data)

    def save_artifact(self, name: str, content: Any, artifact_type: str = "data") -> str:
        """
        Attach an artifact to this step.

        Returns:
            ID of the artifact
        """
        artifact = LedgerArtifact(
            run_id=self.run_id,
            step_id=self.step_id,
            name=name,
            content=content,
            artifact_type=artifact_type,
        )
        return get_store().save_artifact(artifact)


def step(
    name: str,
    run_id: Optional[str] = None,
    attributes: Optional[Dict[str, Any]] = None,
) -> LedgerStep:
    """Create a ledger step context manager."""
    return LedgerStep(name=name, run_id=run_id, attributes=attributes)
