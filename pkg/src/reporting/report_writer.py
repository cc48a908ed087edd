from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from src.learning.evaluation import LearningCurve

AGGREGATE_DIR = "aggregate"
PLOTS_DIR = "plots"
METADATA_FILE = "metadata.json"


class MissingAggregate(FileNotFoundError):
    """No aggregate curves to build plot data from."""


def write_report(report_text: str, output_dir: Path, filename: str = "summary.md") -> Path:
    """Write report text to a file in the specified output directory.

    Args:
        report_text: The report content to write
        output_dir: Directory where the report will be saved
        filename: Name of the report file (default: "summary.md")

    Returns:
        Path to the created report file
    """
    output_dir.mkdir(parents=True, exist_ok=True)
    path = output_dir / filename
    path.write_text(report_text, encoding="utf-8")
    return path


def write_json(data: Dict[str, Any], path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")
    return path


def read_json(path: Path) -> Dict[str, Any]:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def read_returns_csv(path: Path) -> Dict[int, List[float]]:
    """Evaluation episode -> normalized returns, as written by ``LearningCurve.returns_to_csv``."""
    found: Dict[int, List[float]] = {}
    with open(path, newline="", encoding="utf-8") as f:
        for row in csv.DictReader(f):
            found[int(row["episode"])] = [float(v) for v in row["returns"].split()]
    return found


def aggregate_files(output_dir: Path) -> List[Path]:
    folder = Path(output_dir) / AGGREGATE_DIR
    return sorted(folder.glob("*.csv")) if folder.exists() else []


def emit_plot_data(output_dir: Path, agent_order: Optional[Sequence[str]] = None) -> List[Path]:
    """Write one tab-separated figure file plus a JSON plot manifest.

    The figure file has an ``episode`` column and, per agent, ``<agent>_median``,
    ``<agent>_p25`` and ``<agent>_p75`` columns; episodes missing for an agent
    are left empty.

    Args:
        output_dir: Experiment results directory
        agent_order: Column order; defaults to the metadata agent order, then name order

    Returns:
        Paths of the figure file and the manifest

    Raises:
        MissingAggregate: If the directory holds no aggregate curves
    """
    output_dir = Path(output_dir)
    files = aggregate_files(output_dir)
    if not files:
        raise MissingAggregate(f"No aggregate curves under {output_dir / AGGREGATE_DIR}")
    metadata = read_json(output_dir / METADATA_FILE) if (output_dir / METADATA_FILE).exists() else {}
    curves = {f.stem: LearningCurve.from_csv(f) for f in files}
    order = list(agent_order or metadata.get("agents") or [])
    agents = [a for a in order if a in curves] + sorted(a for a in curves if a not in order)
    figure = metadata.get("experiment", output_dir.name)

    episodes = sorted({p.episode for c in curves.values() for p in c.points})
    by_agent = {a: {p.episode: p for p in curves[a].points} for a in agents}
    header = ["episode"] + [f"{a}_{stat}" for a in agents for stat in ("median", "p25", "p75")]
    plots = output_dir / PLOTS_DIR
    plots.mkdir(parents=True, exist_ok=True)
    data_path = plots / f"{figure}.tsv"
    with open(data_path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, delimiter="\t", lineterminator="\n")
        writer.writerow(header)
        for ep in episodes:
            row: List[str] = [str(ep)]
            for a in agents:
                p = by_agent[a].get(ep)
                row += ["", "", ""] if p is None else [f"{p.median:.6f}", f"{p.p25:.6f}", f"{p.p75:.6f}"]
            writer.writerow(row)

    manifest = {
        "title": figure,
        "data": data_path.name,
        "x": {"column": "episode", "label": "training episode"},
        "y": {"label": "normalized return", "range": [-1, 1]},
        "lines": [
            {"agent": a, "median": f"{a}_median", "band": [f"{a}_p25", f"{a}_p75"]} for a in agents
        ],
        "aggregation": "percentiles of evaluation returns pooled across seeds",
    }
    manifest_path = write_json(manifest, plots / f"{figure}.manifest.json")
    return [data_path, manifest_path]
