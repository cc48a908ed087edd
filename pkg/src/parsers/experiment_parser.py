"""Experiment configs: YAML documents naming an environment, machines, agents and seeds.

Grammar (all paths relative to the config file)::

    name: maze_5x5
    environment: {kind: treasure_maze, map: ../maps/maze_5x5.txt, horizon: 40, params: {}}
    machine: {pdrm: ../machines/maze.pdrm, cra: ../machines/letterenv.cra}
    agents:
      - name: top1
        algorithm: q_learning            # or hierarchical
        machine: pdrm                    # cra | translated_cra | path_encoding
        abstraction: {kind: top_k, k: 1} # or {kind: full}
        hyperparams: {episodes: 500}
    seeds: [0, 1, 2]
    output_dir: ../results/maze_5x5
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml

from src.automata.errors import PdrmValidationError
from src.automata.pdrm import PdRM
from src.counting.cra import CRA, CraValidationError
from src.environments.base import BadConfig
from src.environments.registry import build_environment
from src.learning.tables import AbstractionSpec
from src.parsers.cra_parser import load_cra
from src.parsers.errors import AssetError, ParseError
from src.parsers.pdrm_parser import load_pdrm
from src.validation.schema_validator import validate_experiment_document

ALGORITHMS = ("q_learning", "hierarchical")
MACHINE_CHOICES = ("pdrm", "cra", "translated_cra", "path_encoding")


@dataclass
class AgentSpec:
    name: str
    algorithm: str
    machine: str = "pdrm"
    abstraction: AbstractionSpec = field(default_factory=AbstractionSpec)
    hyperparams: Dict[str, Any] = field(default_factory=dict)
    option_k: int = 1
    op_budget: Optional[int] = None
    wall_clock_limit: Optional[float] = None


@dataclass
class ExperimentConfig:
    name: str
    path: Path
    environment: Dict[str, Any]
    agents: List[AgentSpec]
    seeds: List[int]
    output_dir: Path
    config_hash: str
    document: Dict[str, Any]
    pdrm_path: Optional[Path] = None
    cra_path: Optional[Path] = None
    pdrm: Optional[PdRM] = None
    cra: Optional[CRA] = None

    @property
    def base_dir(self) -> Path:
        return self.path.parent

    def agent(self, name: str) -> AgentSpec:
        for a in self.agents:
            if a.name == name:
                return a
        raise KeyError(f"No agent named '{name}' in experiment '{self.name}'")


def _load_yaml(text: str, source: Path) -> tuple[Any, Optional[yaml.Node]]:
    try:
        node = yaml.compose(text)
        document = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        line, column = (mark.line + 1, mark.column + 1) if mark else (0, 0)
        raise ParseError(exc.problem or str(exc), line, column, source) from exc
    except yaml.YAMLError as exc:
        raise ParseError(str(exc), 0, 0, source) from exc
    return document, node


def _mapping_get(node: Optional[yaml.Node], key: str) -> Optional[yaml.Node]:
    if not isinstance(node, yaml.MappingNode):
        return None
    for k, v in node.value:
        if getattr(k, "value", None) == key:
            return v
    return None


def _check_agent_names(agents_node: Optional[yaml.Node], source: Path) -> None:
    seen: Dict[str, yaml.Node] = {}
    if not isinstance(agents_node, yaml.SequenceNode):
        return
    for item in agents_node.value:
        name_node = _mapping_get(item, "name")
        if name_node is None:
            continue
        if name_node.value in seen:
            mark = name_node.start_mark
            raise ParseError(f"Duplicate agent name '{name_node.value}'", mark.line + 1, mark.column + 1, source)
        seen[name_node.value] = name_node


def _resolve(base: Path, raw: Optional[str]) -> Optional[Path]:
    if raw is None:
        return None
    path = Path(raw)
    return path if path.is_absolute() else (base / path).resolve()


def _load_asset(path: Path, loader):
    if not path.exists():
        raise AssetError(path, "file not found")
    try:
        return loader(path)
    except (ParseError, PdrmValidationError, CraValidationError) as exc:
        raise AssetError(path, str(exc)) from exc


def compute_config_hash(document: Dict[str, Any], assets: List[Path]) -> str:
    """SHA-256 over the canonical JSON of the document and the bytes of each asset."""
    digest = hashlib.sha256()
    digest.update(json.dumps(document, sort_keys=True, separators=(",", ":"), default=str).encode("utf-8"))
    for asset in sorted(set(assets)):
        digest.update(b"\0")
        digest.update(asset.name.encode("utf-8"))
        digest.update(asset.read_bytes())
    return digest.hexdigest()


def parse_config(path: Path, schema_path: Optional[Path] = None) -> ExperimentConfig:
    """Parse, validate and resolve an experiment config.

    Args:
        path: Config file
        schema_path: JSON schema, defaults to the shipped experiment schema

    Returns:
        ExperimentConfig with loaded machines and the config hash

    Raises:
        ParseError: On YAML syntax errors, schema violations or duplicate agent names
        AssetError: If a referenced machine or map fails to load or validate
    """
    path = Path(path).resolve()
    if not path.exists():
        raise FileNotFoundError(f"Experiment config not found: {path}")
    document, root = _load_yaml(path.read_text(encoding="utf-8"), path)
    if not isinstance(document, dict):
        raise ParseError("Experiment config must be a mapping", 1, 1, path)
    errors = validate_experiment_document(document, schema_path)
    if errors:
        raise ParseError("; ".join(errors), 0, 0, path)
    _check_agent_names(_mapping_get(root, "agents"), path)

    base = path.parent
    machines = document.get("machine") or {}
    pdrm_path = _resolve(base, machines.get("pdrm"))
    cra_path = _resolve(base, machines.get("cra"))
    pdrm = _load_asset(pdrm_path, load_pdrm) if pdrm_path else None
    cra = _load_asset(cra_path, load_cra) if cra_path else None

    environment = dict(document["environment"])
    map_path = _resolve(base, environment.get("map"))
    if map_path is not None:
        if not map_path.exists():
            raise AssetError(map_path, "file not found")
        environment["map"] = str(map_path)
    try:
        build_environment(environment)
    except (BadConfig, ParseError) as exc:
        raise AssetError(map_path or environment["kind"], str(exc)) from exc

    agents = []
    for raw in document["agents"]:
        agent = AgentSpec(
            name=raw["name"],
            algorithm=raw["algorithm"],
            machine=raw.get("machine", "pdrm"),
            abstraction=AbstractionSpec.from_dict(raw.get("abstraction")),
            hyperparams=dict(raw.get("hyperparams") or {}),
            option_k=int(raw.get("option_k", 1)),
            op_budget=raw.get("op_budget"),
            wall_clock_limit=raw.get("wall_clock_limit"),
        )
        if agent.machine in ("pdrm",) and pdrm is None:
            raise ParseError(f"Agent '{agent.name}' needs machine.pdrm", 0, 0, path)
        if agent.machine in ("cra", "translated_cra") and cra is None:
            raise ParseError(f"Agent '{agent.name}' needs machine.cra", 0, 0, path)
        if agent.algorithm == "hierarchical" and agent.machine not in ("pdrm", "translated_cra"):
            raise ParseError(f"Hierarchical agent '{agent.name}' needs a pushdown machine", 0, 0, path)
        if agent.abstraction.kind == "top_k" and agent.machine in ("cra", "path_encoding"):
            raise ParseError(f"Agent '{agent.name}': counter machines only support the full abstraction", 0, 0, path)
        agents.append(agent)

    assets = [p for p in (pdrm_path, cra_path, map_path) if p is not None]
    output_dir = _resolve(base, document.get("output_dir")) or (base / "results" / document["name"]).resolve()
    return ExperimentConfig(
        name=document["name"],
        path=path,
        environment=environment,
        agents=agents,
        seeds=[int(s) for s in document["seeds"]],
        output_dir=output_dir,
        config_hash=compute_config_hash(document, assets),
        document=document,
        pdrm_path=pdrm_path,
        cra_path=cra_path,
        pdrm=pdrm,
        cra=cra,
    )
