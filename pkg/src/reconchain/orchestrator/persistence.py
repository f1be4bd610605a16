"""Canonical JSON stage artifacts inside the project directory."""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Any

from ..errors import CorruptArtifact, SchemaMismatch
from ..models import SCHEMA_VERSION, AssessmentContext, FindingNarrative

ARTIFACTS = {
    "scan": "scan.json",
    "enrich": "enriched.json",
    "exploit": "exploited.json",
    "narrate": "narratives.json",
}


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_text_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(f".{path.name}.tmp")
    tmp.write_text(text, encoding="utf-8", newline="\n")
    os.replace(tmp, path)


def save_stage(project_dir: str | Path, stage: str, ctx: AssessmentContext, extras: dict | None = None) -> Path:
    project_dir = Path(project_dir)
    project_dir.mkdir(parents=True, exist_ok=True)
    payload = ctx.to_dict()
    if extras:
        payload.update(extras)
    path = project_dir / ARTIFACTS[stage]
    write_text_atomic(path, canonical_json(payload))
    return path


def _read(project_dir: str | Path, stage: str) -> tuple[Path, dict]:
    path = Path(project_dir) / ARTIFACTS[stage]
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise CorruptArtifact(f"{path} does not exist") from None
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CorruptArtifact(f"{path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise CorruptArtifact(f"{path} does not hold a JSON object")
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaMismatch(f"{path} has schema_version {version!r}; supported: {SCHEMA_VERSION}")
    return path, data


def _context_from(path: Path, data: dict) -> AssessmentContext:
    try:
        ctx = AssessmentContext.from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptArtifact(f"{path} has invalid content: {exc}") from None
    problems = ctx.check_invariants()
    stored = data.get("membership")
    if stored is not None and stored != ctx.to_dict()["membership"]:
        problems.append("membership table disagrees with host port records")
    if problems:
        raise CorruptArtifact(f"{path} violates assessment invariants: " + "; ".join(problems))
    return ctx


def load_stage(project_dir: str | Path, stage: str) -> AssessmentContext:
    path, data = _read(project_dir, stage)
    return _context_from(path, data)


def save_narration(
    project_dir: str | Path, ctx: AssessmentContext, summary: str, narratives: list[FindingNarrative]
) -> Path:
    return save_stage(
        project_dir,
        "narrate",
        ctx,
        {"executive_summary": summary, "narratives": [n.to_dict() for n in narratives]},
    )


def load_narration(project_dir: str | Path) -> tuple[AssessmentContext, str, list[FindingNarrative]]:
    path, data = _read(project_dir, "narrate")
    ctx = _context_from(path, data)
    try:
        summary = data["executive_summary"]
        narratives = [FindingNarrative.from_dict(n) for n in data["narratives"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptArtifact(f"{path} has invalid narratives: {exc}") from None
    known = set(ctx.cve_ids())
    strays = [n.cve_id for n in narratives if n.cve_id not in known]
    if strays:
        raise CorruptArtifact(f"{path} has narratives for CVEs outside the assessment: {', '.join(strays)}")
    return ctx, summary, narratives
