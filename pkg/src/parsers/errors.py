from __future__ import annotations

from pathlib import Path
from typing import Optional


class ParseError(ValueError):
    """Malformed input text, located by line and column (both 1-based)."""

    def __init__(self, message: str, line: int = 0, column: int = 0, source: Optional[Path | str] = None):
        self.line = line
        self.column = column
        self.source = str(source) if source is not None else None
        where = f"{self.source}:" if self.source else ""
        super().__init__(f"{where}{line}:{column}: {message}")


class AssetError(ValueError):
    """A file referenced by an experiment config failed to load or validate."""

    def __init__(self, asset: Path | str, reason: str):
        self.asset = str(asset)
        super().__init__(f"Asset '{asset}' is invalid: {reason}")
