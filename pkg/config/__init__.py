"""Configuration management for pdrm-lab."""

__all__ = ["load_config", "get_hyperparam_defaults", "get_worker_count"]
