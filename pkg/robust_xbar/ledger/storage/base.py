"""Base storage interface for the provenance ledger."""

from typing import Any, Dict, List

from robust_xbar.ledger.events import LedgerArtifact, LedgerEvent


class LedgerStore:
    """
    Base class for ledger storage backends.

    This class defines the interface that all storage backends must implement.
    """

    def save_event(self, event: LedgerEvent) -> str:
        """
        Save a ledger event.

        Returns:
            ID of the saved event
        """
        raise NotImplementedError("Subclasses must implement save_event")

    def save_artifact(self, artifact: LedgerArtifact) -> str:
        """
        Save an artifact.

        Returns:
            ID of the saved artifact
        """
        raise NotImplementedError("Subclasses must implement save_artifact")

    def get_run(self, run_id: str) -> Dict[str, Any]:
        """
        Get all events and artifacts of a run, events in recording order.

        Returns:
            Dictionary with run_id, events and artifacts
        """
        raise NotImplementedError("Subclasses must implement get_run")

    def list_runs(self) -> List[Dict[str, Any]]:
        """
        List recorded runs, oldest first.

        Returns:
            One dictionary per run with its run_id and the name of its first step
        """
        raise NotImplementedError("Subclasses must implement list_runs")
