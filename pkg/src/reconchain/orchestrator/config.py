"""Run configuration: CLI-derived RunConfig plus the key/value settings file."""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from ..errors import ConfigError
from ..models import STAGES, TargetSpec

SCANNER_KINDS = ("nmap", "fixture")
EXPLOITER_KINDS = ("exploitdb",)
NLP_KINDS = ("remote", "stub")
REPORTER_KINDS = ("markdown",)

_PROJECT_NAME = re.compile(r"^[A-Za-z0-9_-]+$")

# every key may be overridden by an environment variable of the upper-cased name
SETTING_KEYS = (
    "nvd_api_key",
    "nlp_api_key",
    "nlp_model",
    "nlp_temperature",
    "exploit_mirror_url",
    "nvd_request_delay_ms",
    "nvd_delay_override",
    "nvd_cache_dir",
    "nlp_endpoint",
    "nlp_max_output_tokens",
    "nlp_timeout_s",
    "nlp_workers",
    "nlp_prompts_dir",
    "scanner_fixture",
    "nmap_binary",
    "exploitdb_index",
    "report_template",
    "projects_dir",
)


@dataclass(frozen=True)
class RunConfig:
    targets: TargetSpec
    project_name: str
    scanner_kind: str = "nmap"
    exploiter_kind: str = "exploitdb"
    nlp_kind: str = "remote"
    reporter_kind: str = "markdown"
    config_path: Path | None = None
    resume_from: str | None = None
    offline: bool = False

    def __post_init__(self):
        if not _PROJECT_NAME.fullmatch(self.project_name):
            raise ValueError(f"project name must be alphanumeric, dash or underscore: {self.project_name!r}")
        for value, allowed in (
            (self.scanner_kind, SCANNER_KINDS),
            (self.exploiter_kind, EXPLOITER_KINDS),
            (self.nlp_kind, NLP_KINDS),
            (self.reporter_kind, REPORTER_KINDS),
        ):
            if value not in allowed:
                raise ValueError(f"{value!r} is not one of {allowed}")
        if self.resume_from is not None and self.resume_from not in STAGES:
            raise ValueError(f"unknown stage {self.resume_from!r}")


def read_config_file(path: str | Path) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment, quotes are stripped."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read configuration file {path}: {exc.strerror}") from None
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key = key.strip().lower()
        if key not in SETTING_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown setting {key!r}")
        value = value.strip()
        if len(value) >= 2 and value[0] == value[-1] and value[0] in "'\"":
            value = value[1:-1]
        values[key] = value
    return values


@dataclass(frozen=True)
class Settings:
    values: Mapping[str, str]

    @classmethod
    def load(cls, path: str | Path | None = None, environ: Mapping[str, str] | None = None) -> "Settings":
        environ = os.environ if environ is None else environ
        values = dict(read_config_file(path)) if path is not None else {}
        for key in SETTING_KEYS:
            if environ.get(key.upper()):
                values[key] = environ[key.upper()]
        return cls(values)

    def get(self, key: str, default: str | None = None) -> str | None:
        value = self.values.get(key)
        return default if value in (None, "") else value

    def number(self, key: str, default: float | None = None) -> float | None:
        value = self.get(key)
        if value is None:
            return default
        try:
            return float(value)
        except ValueError:
            raise ConfigError(f"setting {key} must be a number, got {value!r}") from None

    def flag(self, key: str) -> bool:
        return (self.get(key) or "").lower() in ("1", "true", "yes", "on")
