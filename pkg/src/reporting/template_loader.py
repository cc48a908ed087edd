"""Jinja2 rendering for the markdown reports in ``src/reporting/templates``."""

from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Optional

from jinja2 import Environment, FileSystemLoader, StrictUndefined

TEMPLATES_DIR = Path(__file__).parent / "templates"


def format_fixed(value: Optional[float], digits: int = 3) -> str:
    return "-" if value is None else f"{value:.{digits}f}"


def format_optional(value: Any) -> str:
    return "-" if value is None else str(value)


@lru_cache(maxsize=None)
def report_environment(template_dir: Path = TEMPLATES_DIR) -> Environment:
    """Jinja2 environment with the report filters; missing variables raise."""
    env = Environment(
        loader=FileSystemLoader(str(template_dir)),
        trim_blocks=True,
        lstrip_blocks=True,
        keep_trailing_newline=True,
        undefined=StrictUndefined,
    )
    env.filters["fixed"] = format_fixed
    env.filters["optional"] = format_optional
    return env


def render_template(template_name: str, context: Dict[str, Any], template_dir: Optional[Path] = None) -> str:
    """Render a report template.

    Args:
        template_name: File name under the template directory, e.g. "run_summary.md.j2"
        context: Template variables
        template_dir: Directory to load from instead of the shipped templates

    Returns:
        Rendered text

    Raises:
        jinja2.TemplateNotFound: If the template does not exist
        jinja2.UndefinedError: If the template reads a variable missing from ``context``
    """
    env = report_environment(Path(template_dir) if template_dir else TEMPLATES_DIR)
    return env.get_template(template_name).render(**context)
