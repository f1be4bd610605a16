"""Render a ReportModel through a Jinja2 Markdown template."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

import jinja2
from jinja2 import meta

from ..errors import TemplateError
from .model import ReportModel

SEVERITY_LABELS = {"none": "None", "low": "Low", "medium": "Medium", "high": "High", "critical": "Critical"}


def default_template() -> str:
    return resources.files("reconchain.reporter").joinpath("templates", "safr.md.j2").read_text("utf-8")


def load_template(path: str | Path | None = None) -> str:
    return default_template() if path is None else Path(path).read_text("utf-8")


def _cell(value) -> str:
    """Make a value safe inside a Markdown table cell."""
    text = " ".join(str(value).split())
    return text.replace("|", "\\|")


def _environment() -> jinja2.Environment:
    env = jinja2.Environment(
        undefined=jinja2.StrictUndefined,
        keep_trailing_newline=True,
        trim_blocks=True,
        lstrip_blocks=True,
        autoescape=False,
    )
    env.filters["cell"] = _cell
    env.filters["severity"] = lambda s: SEVERITY_LABELS.get(s, str(s))
    return env


def render_report(model: ReportModel, template: str) -> str:
    env = _environment()
    try:
        ast = env.parse(template)
    except jinja2.TemplateSyntaxError as exc:
        raise TemplateError(f"template syntax error at line {exc.lineno}: {exc.message}") from None
    unknown = sorted(meta.find_undeclared_variables(ast) - ReportModel.field_names())
    if unknown:
        raise TemplateError(f"template references unknown placeholder {unknown[0]!r}", placeholder=unknown[0])
    try:
        text = env.from_string(template).render({name: getattr(model, name) for name in ReportModel.field_names()})
    except jinja2.UndefinedError as exc:
        raise TemplateError(f"unresolved placeholder: {exc.message}", placeholder=exc.message) from None
    text = text.replace("\r\n", "\n")
    return text if text.endswith("\n") else text + "\n"
