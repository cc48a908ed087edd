"""Configuration loader for pdrm-lab system settings and learning defaults."""

from __future__ import annotations

import os
import yaml
from pathlib import Path
from typing import Any, Dict, Optional
from dataclasses import dataclass, field


DEFAULT_SYSTEM: Dict[str, Any] = {
    'workers': 1,
    'epsilon_cap': 10_000,
    'explosion_cap': 5_000_000,
    'value_iteration': {'tol': 1e-8, 'tie_tol': 1e-6, 'gamma': 0.99, 'max_iterations': 100_000},
    'equivalence': {'words': 1000, 'max_length': 20, 'seed': 0},
}



def _merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    """Recursively overlay ``override`` on ``base``; nested dicts merge key by key."""
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


@dataclass
class Config:
    """Simplified configuration container."""
    system: Dict[str, Any]
    defaults: Dict[str, Any]
    logging: Dict[str, Any] = field(default_factory=lambda: {'level': 'INFO'})


def load_config(config_path: Optional[Path] = None) -> Config:
    """Load configuration from YAML file."""
    # Load .env automatically if present
    try:
        from dotenv import load_dotenv
        project_root = Path(__file__).resolve().parents[1]
        env_path = project_root / '.env'
        if env_path.exists():
            load_dotenv(env_path)
        else:
            load_dotenv()
    except Exception:
        # dotenv is optional; ignore if not installed
        pass
    if config_path is None:
        config_path = Path(__file__).parent / "pdrm_lab.yaml"

    if not config_path.exists():
        raise FileNotFoundError(f"Configuration file not found: {config_path}")

    with open(config_path, 'r', encoding='utf-8') as f:
        data = yaml.safe_load(f) or {}

    system = _merge(DEFAULT_SYSTEM, data.get('system') or {})
    logging_cfg = {'level': 'INFO', **(data.get('logging') or {})}
    if os.getenv('PDRM_LAB_LOG_LEVEL'):
        logging_cfg['level'] = os.environ['PDRM_LAB_LOG_LEVEL']
    return Config(
        system=system,
        defaults=data.get('defaults') or {'hyperparams': {}},
        logging=logging_cfg,
    )


def get_hyperparam_defaults(config: Config) -> Dict[str, Any]:
    """Get default learning hyperparameters.

    Args:
        config: Configuration object

    Returns:
        Dictionary of hyperparameter defaults (empty if not configured)
    """
    return dict(config.defaults.get('hyperparams') or {})


def get_epsilon_cap(config: Config) -> int:
    return int(config.system.get('epsilon_cap', DEFAULT_SYSTEM['epsilon_cap']))


def get_explosion_cap(config: Config) -> int:
    return int(config.system.get('explosion_cap', DEFAULT_SYSTEM['explosion_cap']))


def get_worker_count(config: Config) -> int:
    """Get the worker pool size.

    Args:
        config: Configuration object

    Returns:
        Value of PDRM_LAB_WORKERS if set, else ``system.workers`` (at least 1)

    Raises:
        ValueError: If PDRM_LAB_WORKERS is not an integer
    """
    raw = os.getenv('PDRM_LAB_WORKERS')
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ValueError(f"PDRM_LAB_WORKERS must be an integer, got {raw!r}")
    return max(1, int(config.system.get('workers', 1)))


def get_value_iteration_config(config: Config) -> Dict[str, Any]:
    return {**DEFAULT_SYSTEM['value_iteration'], **(config.system.get('value_iteration') or {})}


def get_equivalence_config(config: Config) -> Dict[str, Any]:
    return {**DEFAULT_SYSTEM['equivalence'], **(config.system.get('equivalence') or {})}
