"""Validation of machine descriptions and experiment documents."""

from src.validation.cra_validator import find_cra_errors, validate_cra
from src.validation.pdrm_validator import expand_wildcards, find_pdrm_errors, validate_pdrm
from src.validation.schema_validator import load_schema, validate_experiment_document, validate_instance

__all__ = [
    "expand_wildcards",
    "find_cra_errors",
    "find_pdrm_errors",
    "load_schema",
    "validate_cra",
    "validate_experiment_document",
    "validate_instance",
    "validate_pdrm",
]
