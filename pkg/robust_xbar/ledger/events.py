"""Event and artifact records of the provenance ledger."""

import dataclasses
import time
import uuid
from enum import Enum
from typing import Any, Dict, Optional

import numpy as np

from robust_xbar.core.types import Subgroup

# Sequences longer than this are summarised instead of copied.
_MAX_INLINE_ITEMS = 32


def json_safe(value: Any) -> Any:
    """
    Convert a parameter or result into something ``json.dumps`` accepts.

    Large arrays and sequences are replaced by a short description so that
    recording a call never copies a whole dataset into the ledger.
    """
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Subgroup):
        return {"id": value.id, "n": value.n}
    if isinstance(value, np.ndarray):
        if value.size > _MAX_INLINE_ITEMS:
            return {"array_shape": list(value.shape), "dtype": str(value.dtype)}
        return value.tolist()
    if isinstance(value, dict):
        return {str(json_safe(k)): json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = list(value)
        if len(items) > _MAX_INLINE_ITEMS:
            return {"sequence_length": len(items), "first": json_safe(items[0])}
        return [json_safe(item) for item in items]
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {f.name: json_safe(getattr(value, f.name)) for f in dataclasses.fields(value)}
    if hasattr(value, "_asdict"):
        return json_safe(value._asdict())
    text = repr(value)
    return text if len(text) <= 200 else text[:197] + "..."


class LedgerEvent:
    """
    One event of a run.

    Events are recorded when steps start, end, fail, or report progress.
    """

    def __init__(
        self,
        run_id: str,
        step_id: str,
        parent_id: Optional[str],
        step_name: str,
        event_type: str,
        timestamp: float,
        data: Dict[str, Any],
    ):
        """
        Initialize a ledger event.

        Args:
            run_id: ID of the run this event belongs to
            step_id: ID of the step that emitted the event
            parent_id: ID of the enclosing step (None for the root step)
            step_name: Name of the step
            event_type: "start", "end", "error" or a custom event name
            timestamp: Time when the event occurred
            data: JSON-safe payload
        """
        self.run_id = run_id
        self.step_id = step_id
        self.parent_id = parent_id
        self.step_name = step_name
        self.event_type = event_type
        self.timestamp = timestamp
        self.data = data

    def to_dict(self) -> Dict[str, Any]:
        return {
            "run_id": self.run_id,
            "step_id": self.step_id,
            "parent_id": self.parent_id,
            "step_name": self.step_name,
            "event_type": self.event_type,
            "timestamp": self.timestamp,
            "data": self.data,
        }


class LedgerArtifact:
    """A named object attached to a step, such as an emitted report."""

    def __init__(self, run_id: str, step_id: str, name: str, content: Any, artifact_type: str):
        self.id = str(uuid.uuid4())
        self.run_id = run_id
        self.step_id = step_id
        self.name = name
        self.content = json_safe(content)
        self.artifact_type = artifact_type
        self.timestamp = time.time()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "id": self.id,
            "run_id": self.run_id,
            "step_id": self.step_id,
            "name": self.name,
            "content": self.content,
            "artifact_type": self.artifact_type,
            "timestamp": self.timestamp,
        }
