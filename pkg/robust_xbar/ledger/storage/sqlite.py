"""SQLite storage backend for the provenance ledger."""

import json
import logging
import os
import sqlite3
from typing import Any, Dict, List

from robust_xbar.ledger.events import LedgerArtifact, LedgerEvent
from robust_xbar.ledger.storage.base import LedgerStore

logger = logging.getLogger("robust_xbar.ledger.storage.sqlite")


class SQLiteLedgerStore(LedgerStore):
    """
    Stores the ledger in a SQLite database file.

    Several CLI invocations can share one file, which is how a report is
    traced back to the run that produced it.
    """

    def __init__(self, database_path: str = "ledger.db"):
        """
        Initialize SQLite storage.

        Args:
            database_path: Path to SQLite database file
        """
        os.makedirs(os.path.dirname(os.path.abspath(database_path)), exist_ok=True)
        self.database_path = database_path
        self._create_tables()
        logger.info(f"Connected to SQLite ledger at {database_path}")

    def _create_tables(self) -> None:
        with sqlite3.connect(self.database_path) as conn:
            cursor = conn.cursor()
            cursor.execute('''
            CREATE TABLE IF NOT EXISTS ledger_events (
                seq INTEGER PRIMARY KEY AUTOINCREMENT,
                run_id TEXT NOT NULL,
                step_id TEXT NOT NULL,
                parent_id TEXT,
                step_name TEXT NOT NULL,
                event_type TEXT NOT NULL,
                timestamp REAL NOT NULL,
                data TEXT NOT NULL
            )
            ''')
            cursor.execute('CREATE INDEX IF NOT EXISTS idx_events_run_id ON ledger_events(run_id)')
            cursor.execute('''
            CREATE TABLE IF NOT EXISTS ledger_artifacts (
                id TEXT PRIMARY KEY,
                run_id TEXT NOT NULL,
                step_id TEXT NOT NULL,
                name TEXT NOT NULL,
                content TEXT NOT NULL,
                artifact_type TEXT NOT NULL,
                timestamp REAL NOT NULL
            )
            ''')
            cursor.execute('CREATE INDEX IF NOT EXISTS idx_artifacts_run_id ON ledger_artifacts(run_id)')
            conn.commit()

    def save_event(self, event: LedgerEvent) -> str:
        with sqlite3.connect(self.database_path) as conn:
            cursor = conn.cursor()
            cursor.execute('''
            INSERT INTO ledger_events
            (run_id, step_id, parent_id, step_name, event_type, timestamp, data)
            VALUES (?, ?, ?, ?, ?, ?, ?)
            ''', (
                event.run_id,
                event.step_id,
                event.parent_id,
                event.step_name,
                event.event_type,
                event.timestamp,
                json.dumps(event.data),
            ))
            conn.commit()
            return str(cursor.lastrowid)

    def save_artifact(self, artifact: LedgerArtifact) -> str:
        with sqlite3.connect(self.database_path) as conn:
            conn.execute('''
            INSERT INTO ledger_artifacts
            (id, run_id, step_id, name, content, artifact_type, timestamp)
            VALUES (?, ?, ?, ?, ?, ?, ?)
            ''', (
                artifact.id,
                artifact.run_id,
                artifact.step_id,
                artifact.name,
                json.dumps(artifact.content),
                artifact.artifact_type,
                artifact.timestamp,
            ))
            conn.commit()
        return artifact.id

    def get_run(self, run_id: str) -> Dict[str, Any]:
        events = []
        artifacts = []
        with sqlite3.connect(self.database_path) as conn:
            conn.row_factory = sqlite3.Row
            cursor = conn.cursor()
            cursor.execute('SELECT * FROM ledger_events WHERE run_id = ? ORDER BY seq', (run_id,))
            for row in cursor.fetchall():
                event = dict(row)
                del event["seq"]
                event["data"] = json.loads(event["data"])
                events.append(event)
            cursor.execute(
                'SELECT * FROM ledger_artifacts WHERE run_id = ? ORDER BY timestamp', (run_id,)
            )
            for row in cursor.fetchall():
                artifact = dict(row)
                artifact["content"] = json.loads(artifact["content"])
                artifacts.append(artifact)
        return {"run_id": run_id, "events": events, "artifacts": artifacts}

    def list_runs(self) -> List[Dict[str, Any]]:
        with sqlite3.connect(self.database_path) as conn:
            rows = conn.execute('''
            SELECT e.run_id, e.step_name FROM ledger_events e
            JOIN (SELECT run_id, MIN(seq) AS first FROM ledger_events GROUP BY run_id) f
              ON e.seq = f.first
            ORDER BY e.seq
            ''').fetchall()
        return [{"run_id": run_id, "name": name} for run_id, name in rows]
