"""Stage sequencing, per-stage timing and project directory handling."""

from __future__ import annotations

import dataclasses
import logging
import os
import sys
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterator

from ..data import EXPLOIT_INDEX, EXPLOIT_MIRROR, NVD_CACHE, THREE_HOST_SCAN, data_path
from ..enricher import EnrichmentPolicy, NvdClient, enrich, resolve_request_delay
from ..errors import ConfigError, ProjectLocked, ReconChainError
from ..exploiter import annotate_exploits, console_summary, load_index, make_fetcher
from ..exploiter.fetch import DEFAULT_MIRROR_URL, ExploitFetcher, LocalMirrorFetcher
from ..exploiter.index import ExploitIndex
from ..models import STAGES, AssessmentContext
from ..nlp import (
    CompletionProvider,
    ProviderParams,
    RemoteProvider,
    StubProvider,
    generate_executive_summary,
    generate_findings,
    load_prompts,
    screen_narratives,
)
from ..nlp.agent import DEFAULT_WORKERS
from ..nlp.prompts import PromptTemplate
from ..nlp.providers import DEFAULT_ENDPOINT, DEFAULT_MODEL
from ..reporter import build_report_model, load_template, render_report
from ..scanner import FixtureBackend, NmapBackend, ScannerBackend, scan
from .config import RunConfig, Settings
from .persistence import load_narration, load_stage, save_narration, save_stage, write_text_atomic, canonical_json

logger = logging.getLogger(__name__)

TIMING_LABELS = (
    "Port Discovery",
    "Vulnerability Discovery",
    "OS Discovery",
    "Exploiter",
    "Executive Summary",
    "Finding report",
    "Render report",
)
PHASE_LABELS = {
    "port-discovery": "Port Discovery",
    "service-version": "Vulnerability Discovery",
    "vuln-script": "Vulnerability Discovery",
    "os-discovery": "OS Discovery",
}
SUMMARY_PLACEHOLDER = (
    "_The executive summary could not be generated automatically. "
    "ANALYST: write the executive summary for this assessment._"
)


@dataclass(frozen=True)
class StageTiming:
    stage: str
    seconds: float

    def __post_init__(self):
        if self.stage not in TIMING_LABELS:
            raise ValueError(f"unknown timing label {self.stage!r}")
        if self.seconds < 0:
            raise ValueError("timings cannot be negative")


class StageTimer:
    def __init__(self):
        self._seconds: dict[str, float] = {}

    def add(self, label: str, seconds: float) -> None:
        self._seconds[label] = self._seconds.get(label, 0.0) + max(seconds, 0.0)

    @contextmanager
    def measure(self, label: str) -> Iterator[None]:
        started = time.perf_counter()
        try:
            yield
        finally:
            self.add(label, time.perf_counter() - started)

    def rows(self) -> list[StageTiming]:
        return [StageTiming(label, self._seconds[label]) for label in TIMING_LABELS if label in self._seconds]


def timing_table(rows: list[StageTiming]) -> str:
    width = max(len(label) for label in TIMING_LABELS)
    lines = [f"{'Task':<{width}}  Seconds", f"{'-' * width}  -------"]
    lines += [f"{row.stage:<{width}}  {row.seconds:7.3f}" for row in rows]
    lines.append(f"{'Total time':<{width}}  {sum(r.seconds for r in rows):7.3f}")
    return "\n".join(lines) + "\n"


@dataclass
class Backends:
    scanner: ScannerBackend
    nvd: NvdClient
    index: ExploitIndex
    fetcher: ExploitFetcher
    provider: CompletionProvider
    params: ProviderParams
    prompts: dict[str, PromptTemplate]
    template: str
    nlp_workers: int = DEFAULT_WORKERS


@dataclass
class RunSummary:
    project_dir: Path
    stages_run: list[str]
    timings: list[StageTiming]
    degradations: list[str] = field(default_factory=list)
    report_path: Path | None = None


def project_dir_for(config: RunConfig, settings: Settings) -> Path:
    root = Path(settings.get("projects_dir") or os.getcwd())
    return root / config.project_name


@contextmanager
def project_lock(project_dir: Path) -> Iterator[None]:
    project_dir.mkdir(parents=True, exist_ok=True)
    lock = project_dir / ".lock"
    try:
        fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise ProjectLocked(f"project {project_dir} is in use by another run (remove {lock} if stale)") from None
    try:
        os.write(fd, str(os.getpid()).encode())
        os.close(fd)
        yield
    finally:
        lock.unlink(missing_ok=True)


def build_backends(config: RunConfig, settings: Settings, project_dir: Path) -> Backends:
    """Instantiate the stage backends; ``--offline`` forces local-only ones."""
    offline = config.offline

    if config.scanner_kind == "fixture" or offline:
        scanner: ScannerBackend = FixtureBackend(settings.get("scanner_fixture") or data_path(*THREE_HOST_SCAN))
    else:
        scanner = NmapBackend(settings.get("nmap_binary") or "nmap")

    api_key = settings.get("nvd_api_key")
    delay_ms = settings.number("nvd_request_delay_ms")
    delay = resolve_request_delay(
        None if delay_ms is None else delay_ms / 1000.0, api_key, settings.flag("nvd_delay_override")
    )
    cache_dir = Path(settings.get("nvd_cache_dir") or Path.home() / ".cache" / "reconchain" / "nvd")
    policy = EnrichmentPolicy(
        request_delay=delay,
        cache_dir=cache_dir,
        offline_only=offline,
        seed_dirs=(data_path(*NVD_CACHE),) if offline else (),
    )
    nvd = NvdClient(policy, api_key=api_key)

    index_path = Path(settings.get("exploitdb_index") or data_path(*EXPLOIT_INDEX))
    try:
        index = load_index(index_path.read_bytes())
    except OSError as exc:
        raise ConfigError(f"cannot read exploit index {index_path}: {exc.strerror}") from None

    mirror = settings.get("exploit_mirror_url")
    if offline:
        local = mirror if mirror and not mirror.startswith(("http://", "https://")) else None
        fetcher: ExploitFetcher = make_fetcher(local) if local else LocalMirrorFetcher(data_path(*EXPLOIT_MIRROR))
    else:
        fetcher = make_fetcher(mirror or DEFAULT_MIRROR_URL)

    try:
        params = ProviderParams(
            model_name=settings.get("nlp_model") or DEFAULT_MODEL,
            temperature=settings.number("nlp_temperature", 0.2),
            max_output_tokens=int(settings.number("nlp_max_output_tokens", 1024)),
            request_timeout=settings.number("nlp_timeout_s", 120.0),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if config.nlp_kind == "stub" or offline:
        provider: CompletionProvider = StubProvider()
        params = dataclasses.replace(params, model_name=StubProvider.model_name)
    else:
        key = settings.get("nlp_api_key")
        if not key:
            raise ConfigError("the remote NLP agent needs nlp_api_key (configuration file or NLP_API_KEY)")
        provider = RemoteProvider(key, endpoint=settings.get("nlp_endpoint") or DEFAULT_ENDPOINT)

    try:
        prompts = load_prompts(settings.get("nlp_prompts_dir"))
        template = load_template(settings.get("report_template"))
    except OSError as exc:
        raise ConfigError(f"cannot read prompt or template asset: {exc}") from None
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    return Backends(
        scanner=scanner,
        nvd=nvd,
        index=index,
        fetcher=fetcher,
        provider=provider,
        params=params,
        prompts=prompts,
        template=template,
        nlp_workers=int(settings.number("nlp_workers", DEFAULT_WORKERS)),
    )


def _mark(ctx: AssessmentContext, stage: str, degraded: bool) -> AssessmentContext:
    return dataclasses.replace(ctx, stage_status=dict(ctx.stage_status, **{stage: "degraded" if degraded else "done"}))


def run_pipeline(
    config: RunConfig,
    backends: Backends | None = None,
    settings: Settings | None = None,
    out: IO[str] | None = None,
) -> RunSummary:
    """Run scan -> enrich -> exploit -> narrate -> report, persisting after each stage.

    Fatal errors (scanner missing, configuration, template) propagate; every
    other problem is recorded as a degradation and the run continues.
    """
    out = out or sys.stdout
    settings = settings or Settings.load(config.config_path)
    project_dir = project_dir_for(config, settings)
    start = STAGES.index(config.resume_from or "scan")
    timer = StageTimer()
    summary = RunSummary(project_dir=project_dir, stages_run=[], timings=[])

    with project_lock(project_dir):
        backends = backends or build_backends(config, settings, project_dir)

        ctx: AssessmentContext | None = None
        exec_summary = ""
        narratives = []
        if start == STAGES.index("report"):
            ctx, exec_summary, narratives = load_narration(project_dir)
        elif start > 0:
            ctx = load_stage(project_dir, STAGES[start - 1])

        for stage in STAGES[start:]:
            logger.info("stage %s", stage)
            summary.stages_run.append(stage)

            if stage == "scan":
                hosts = scan(config.targets, backends.scanner, lambda ph, s: timer.add(PHASE_LABELS[ph], s))
                ctx = _mark(AssessmentContext(targets=config.targets, hosts=hosts), "scan", False)
                save_stage(project_dir, "scan", ctx)

            elif stage == "enrich":
                with timer.measure("Vulnerability Discovery"):
                    enriched = enrich(ctx.hosts, backends.nvd.policy, backends.nvd)
                ctx = dataclasses.replace(
                    ctx,
                    vulnerabilities=enriched.vulnerabilities,
                    stage_status=dict(ctx.stage_status, enrich=enriched.stage_status["enrich"]),
                )
                unresolved = sorted(c for c, r in ctx.vulnerabilities.items() if r.source == "unresolved")
                if unresolved:
                    summary.degradations.append(f"enrich: {len(unresolved)} CVE(s) unresolved ({', '.join(unresolved)})")
                save_stage(project_dir, "enrich", ctx)

            elif stage == "exploit":
                with timer.measure("Exploiter"):
                    ctx = annotate_exploits(ctx, backends.index, backends.fetcher, project_dir)
                failed = sorted(
                    {r.entry.exploit_id for refs in ctx.exploits.values() for r in refs if r.local_path is None}
                )
                if failed:
                    summary.degradations.append(
                        "exploit: could not download " + ", ".join(f"EDB-{i}" for i in failed)
                    )
                save_stage(project_dir, "exploit", ctx)
                out.write(console_summary(ctx, base_dir=project_dir))

            elif stage == "narrate":
                degraded = False
                with timer.measure("Executive Summary"):
                    try:
                        exec_summary = generate_executive_summary(ctx, backends.provider, backends.params, backends.prompts)
                    except ReconChainError as exc:
                        exec_summary = SUMMARY_PLACEHOLDER
                        degraded = True
                        summary.degradations.append(f"narrate: executive summary unavailable ({exc})")
                with timer.measure("Finding report"):
                    narratives = generate_findings(
                        ctx, backends.provider, backends.params, backends.prompts, backends.nlp_workers
                    )
                    narratives = screen_narratives(narratives, ctx)
                flagged = [n for n in narratives if n.status != "ok"]
                if flagged:
                    degraded = True
                    summary.degradations.append(
                        "narrate: findings need review: " + ", ".join(f"{n.cve_id} ({n.status})" for n in flagged)
                    )
                ctx = _mark(ctx, "narrate", degraded)
                save_narration(project_dir, ctx, exec_summary, narratives)

            elif stage == "report":
                with timer.measure("Render report"):
                    notices = tuple(_report_notices(ctx, exec_summary, narratives))
                    model = build_report_model(ctx, exec_summary, narratives, config.project_name, notices)
                    document = render_report(model, backends.template)
                    report_path = project_dir / "report.md"
                    write_text_atomic(report_path, document)
                summary.report_path = report_path

        summary.timings = timer.rows()
        write_text_atomic(
            project_dir / "timings.json",
            canonical_json([{"stage": t.stage, "seconds": round(t.seconds, 6)} for t in summary.timings]),
        )
    out.write("\n" + timing_table(summary.timings))
    if summary.degradations:
        out.write("\nCompleted with degradations:\n" + "".join(f"  - {d}\n" for d in summary.degradations))
    if summary.report_path:
        out.write(f"\nReport written to {summary.report_path}\n")
    return summary


def _report_notices(ctx: AssessmentContext, exec_summary: str, narratives) -> Iterator[str]:
    if exec_summary == SUMMARY_PLACEHOLDER:
        yield "The executive summary could not be generated and must be written by the assessor."
    unresolved = sorted(c for c, r in ctx.vulnerabilities.items() if r.source == "unresolved")
    if unresolved:
        yield "No vulnerability database data was available for: " + ", ".join(unresolved) + "."
    failed = sorted({r.entry.exploit_id for refs in ctx.exploits.values() for r in refs if r.local_path is None})
    if failed:
        yield "Some exploits could not be downloaded: " + ", ".join(f"EDB-{i}" for i in failed) + "."
    flagged = [n.cve_id for n in narratives if n.status != "ok"]
    if flagged:
        yield "Generated narratives were withheld or incomplete for: " + ", ".join(flagged) + "."
