from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, Optional

from jsonschema import Draft7Validator

DEFAULT_SCHEMA = Path(__file__).resolve().parents[2] / "schema" / "experiment.schema.json"


def load_schema(schema_path: Optional[Path] = None) -> Draft7Validator:
    """Load a JSON schema from file.

    Args:
        schema_path: Path to the JSON schema file (defaults to the experiment schema)

    Returns:
        Draft7Validator instance for schema validation
    """
    schema = json.loads(Path(schema_path or DEFAULT_SCHEMA).read_text(encoding="utf-8"))
    Draft7Validator.check_schema(schema)
    return Draft7Validator(schema)


def validate_instance(validator: Draft7Validator, instance: Dict[str, Any]) -> list[str]:
    """Validate an instance against a JSON schema.

    Args:
        validator: Draft7Validator instance
        instance: Dictionary to validate

    Returns:
        List of validation error messages, prefixed with the failing path (empty if valid)
    """
    errors = []
    for e in sorted(validator.iter_errors(instance), key=lambda e: list(map(str, e.absolute_path))):
        where = "/".join(str(p) for p in e.absolute_path)
        errors.append(f"{where}: {e.message}" if where else e.message)
    return errors


def validate_experiment_document(document: Dict[str, Any], schema_path: Optional[Path] = None) -> list[str]:
    return validate_instance(load_schema(schema_path), document)
