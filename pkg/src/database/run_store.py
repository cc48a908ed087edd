"""SQLite registry of training runs, used to resume experiments."""

import json
import sqlite3
from pathlib import Path
from typing import Any, Dict, List, Optional

COMPLETED = "completed"
FAILED = "failed"


class ConfigHashMismatch(RuntimeError):
    """The results directory belongs to a different version of the config."""

    def __init__(self, stored: str, current: str):
        super().__init__(
            f"Results directory was produced by config hash {stored[:12]}, current config is {current[:12]}; "
            "use a fresh output_dir or clear it with reset_runs.py"
        )
        self.stored = stored
        self.current = current


class RunStore:
    """Run registry keyed on (config hash, agent, seed)."""

    def __init__(self, db_path: Path = Path("runs.db")):
        """
        Initialize the run store.

        Args:
            db_path: Path to the SQLite database file
        """
        self.db_path = Path(db_path)
        self.db_path.parent.mkdir(parents=True, exist_ok=True)
        self._init_database()

    def _init_database(self):
        """Initialize the database schema."""
        with sqlite3.connect(str(self.db_path)) as conn:
            conn.execute("""
                CREATE TABLE IF NOT EXISTS runs (
                    config_hash TEXT NOT NULL,
                    agent TEXT NOT NULL,
                    seed INTEGER NOT NULL,
                    status TEXT NOT NULL,
                    summary TEXT,  -- JSON object with final statistics
                    error TEXT,
                    updated_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP,
                    PRIMARY KEY (config_hash, agent, seed)
                )
            """)
            conn.execute("""
                CREATE TABLE IF NOT EXISTS experiment (
                    id INTEGER PRIMARY KEY CHECK (id = 1),
                    name TEXT NOT NULL,
                    config_hash TEXT NOT NULL
                )
            """)
            conn.commit()

    def bind(self, name: str, config_hash: str) -> None:
        """Claim the registry for an experiment config.

        Raises:
            ConfigHashMismatch: If it already holds runs of another config hash
        """
        with sqlite3.connect(str(self.db_path)) as conn:
            row = conn.execute("SELECT config_hash FROM experiment WHERE id = 1").fetchone()
            if row is None:
                conn.execute("INSERT INTO experiment (id, name, config_hash) VALUES (1, ?, ?)", (name, config_hash))
                conn.commit()
            elif row[0] != config_hash:
                raise ConfigHashMismatch(row[0], config_hash)

    def bound_hash(self) -> Optional[str]:
        with sqlite3.connect(str(self.db_path)) as conn:
            row = conn.execute("SELECT config_hash FROM experiment WHERE id = 1").fetchone()
        return row[0] if row else None

    def record(self, config_hash: str, agent: str, seed: int, status: str,
               summary: Optional[Dict[str, Any]] = None, error: Optional[str] = None) -> None:
        with sqlite3.connect(str(self.db_path)) as conn:
            conn.execute(
                """
                INSERT OR REPLACE INTO runs (config_hash, agent, seed, status, summary, error, updated_at)
                VALUES (?, ?, ?, ?, ?, ?, CURRENT_TIMESTAMP)
                """,
                (config_hash, agent, seed, status, json.dumps(summary or {}, sort_keys=True), error),
            )
            conn.commit()

    def is_completed(self, config_hash: str, agent: str, seed: int) -> bool:
        with sqlite3.connect(str(self.db_path)) as conn:
            row = conn.execute(
                "SELECT status FROM runs WHERE config_hash = ? AND agent = ? AND seed = ?",
                (config_hash, agent, seed),
            ).fetchone()
        return row is not None and row[0] == COMPLETED

    def runs(self, config_hash: str) -> List[Dict[str, Any]]:
        with sqlite3.connect(str(self.db_path)) as conn:
            conn.row_factory = sqlite3.Row
            rows = conn.execute(
                "SELECT agent, seed, status, summary, error FROM runs WHERE config_hash = ? ORDER BY agent, seed",
                (config_hash,),
            ).fetchall()
        return [
            {"agent": r["agent"], "seed": r["seed"], "status": r["status"],
             "summary": json.loads(r["summary"] or "{}"), "error": r["error"]}
            for r in rows
        ]

    def clear(self) -> int:
        """Delete every run and the experiment binding; returns the number of runs removed."""
        with sqlite3.connect(str(self.db_path)) as conn:
            count = conn.execute("SELECT COUNT(*) FROM runs").fetchone()[0]
            conn.execute("DELETE FROM runs")
            conn.execute("DELETE FROM experiment")
            conn.commit()
        return int(count)
