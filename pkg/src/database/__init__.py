"""Run registry storage."""

from .run_store import COMPLETED, FAILED, ConfigHashMismatch, RunStore

__all__ = ["COMPLETED", "FAILED", "ConfigHashMismatch", "RunStore"]
