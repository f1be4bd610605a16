"""Exploit discovery and preparation. Nothing here executes exploit code."""

from __future__ import annotations

import dataclasses
import logging
from pathlib import Path

from ..models import AssessmentContext, ExploitRef
from .compile import extract_compile_spec, run_compile
from .fetch import (
    DEFAULT_MIRROR_URL,
    ExploitFetcher,
    LocalMirrorFetcher,
    RemoteFetcher,
    fetch_exploit,
    make_fetcher,
)
from .index import ExploitIndex, is_framework_module, load_index, search
from .language import detect_language
from .summary import console_summary

logger = logging.getLogger(__name__)

__all__ = [
    "DEFAULT_MIRROR_URL",
    "ExploitFetcher",
    "ExploitIndex",
    "LocalMirrorFetcher",
    "RemoteFetcher",
    "annotate_exploits",
    "console_summary",
    "detect_language",
    "extract_compile_spec",
    "fetch_exploit",
    "is_framework_module",
    "load_index",
    "make_fetcher",
    "run_compile",
    "search",
]


def annotate_exploits(
    ctx: AssessmentContext, index: ExploitIndex, fetcher: ExploitFetcher, project_dir: str | Path
) -> AssessmentContext:
    """Attach candidate exploits to every CVE, downloading each exploit once."""
    fetched: dict[int, ExploitRef] = {}
    exploits: dict[str, list[ExploitRef]] = {}
    for cve_id in sorted(ctx.vulnerabilities):
        refs = []
        for entry in search(index, cve_id):
            if entry.exploit_id not in fetched:
                try:
                    fetched[entry.exploit_id] = fetch_exploit(entry, project_dir, fetcher)
                except Exception as exc:
                    logger.warning("exploit %d failed: %s", entry.exploit_id, exc)
                    fetched[entry.exploit_id] = ExploitRef(entry=entry, fetch_error=str(exc))
            refs.append(fetched[entry.exploit_id])
        exploits[cve_id] = refs
    failed = any(ref.local_path is None for ref in fetched.values())
    status = dict(ctx.stage_status, exploit="degraded" if failed else "done")
    return dataclasses.replace(ctx, exploits=exploits, stage_status=status)
