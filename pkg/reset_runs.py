#!/usr/bin/env python3
"""Clear the run registry of an experiment results directory so it can be reused."""

import sys
from pathlib import Path

# Add project root to Python path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from src.database.run_store import RunStore


def main():
    if len(sys.argv) != 2:
        print("Usage: python reset_runs.py <results-dir>")
        sys.exit(1)
    db_path = Path(sys.argv[1]) / "runs.db"
    if not db_path.exists():
        print(f"❌ No run registry at {db_path}")
        sys.exit(1)

    print(f"🔄 Clearing {db_path}...")
    removed = RunStore(db_path).clear()
    print(f"✅ Removed {removed} runs; the directory can now take a changed config.")
    print("💡 Old run files are overwritten as runs are retrained.")


if __name__ == "__main__":
    main()
