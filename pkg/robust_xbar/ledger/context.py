"""Thread-local storage for the current ledger run."""

import threading
from typing import Optional


class RunContext:
    """
    Thread-local run context.

    Holds the id of the run being recorded and the id of the innermost open
    step, so nested steps attach to their parent without passing ids around.
    """

    _local = threading.local()

    @classmethod
    def get_current_run_id(cls) -> Optional[str]:
        return getattr(cls._local, "run_id", None)

    @classmethod
    def set_current_run_id(cls, run_id: Optional[str]) -> None:
        cls._local.run_id = run_id

    @classmethod
    def get_current_parent_id(cls) -> Optional[str]:
        return getattr(cls._local, "parent_id", None)

    @classmethod
    def set_current_parent_id(cls, parent_id: Optional[str]) -> None:
        cls._local.parent_id = parent_id

    @classmethod
    def clear(cls) -> None:
        """Clear the current context."""
        cls._local.run_id = None
        cls._local.parent_id = None
