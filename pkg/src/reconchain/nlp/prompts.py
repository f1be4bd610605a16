"""Prompt templates stored as text assets with ``{name}`` placeholders."""

from __future__ import annotations

import string
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

SECTIONS = ("executive_summary", "finding_rationale", "finding_remediation")


@dataclass(frozen=True)
class PromptTemplate:
    section: str
    context_text: str
    placeholder_names: tuple[str, ...]

    def __post_init__(self):
        if self.section not in SECTIONS:
            raise ValueError(f"unknown prompt section: {self.section}")
        used = placeholders(self.context_text)
        unknown = used - set(self.placeholder_names)
        if unknown:
            raise ValueError(f"{self.section} prompt uses undeclared placeholder(s): {sorted(unknown)}")

    @classmethod
    def from_text(cls, section: str, text: str) -> "PromptTemplate":
        return cls(section, text, tuple(sorted(placeholders(text))))

    def render(self, **binding) -> str:
        missing = [n for n in self.placeholder_names if n not in binding]
        if missing:
            raise KeyError(f"{self.section} prompt needs values for: {', '.join(missing)}")
        return self.context_text.format_map(binding)


def placeholders(text: str) -> set[str]:
    return {field for _, field, _, _ in string.Formatter().parse(text) if field}


def load_prompts(directory: str | Path | None = None) -> dict[str, PromptTemplate]:
    """Read ``<section>.txt`` for every section, from ``directory`` or the bundled set."""
    prompts = {}
    for section in SECTIONS:
        if directory is None:
            text = resources.files("reconchain.nlp").joinpath("prompts", f"{section}.txt").read_text("utf-8")
        else:
            text = (Path(directory) / f"{section}.txt").read_text("utf-8")
        prompts[section] = PromptTemplate.from_text(section, text)
    return prompts
