"""Aggregate an assessment and its narratives into report-ready rows."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone

from .. import __version__
from ..errors import InconsistentInput
from ..models import SEVERITY_RANK, AssessmentContext, FindingNarrative, address_key, format_timestamp

PENDING = "Pending analyst review."


@dataclass(frozen=True)
class ExploitRow:
    exploit_id: int
    title: str
    platform: str
    verified: bool
    language: str
    local_path: str | None
    compile_command: str | None = None


@dataclass(frozen=True)
class FindingEntry:
    cve_id: str
    title: str
    description: str
    severity: str
    cvss_score: float | None
    cvss_vector: str | None
    severity_rationale: str
    affected: tuple[tuple[str, str], ...]  # (address, "port/proto")
    exploits: tuple[ExploitRow, ...]
    remediation_steps: tuple[str, ...]
    status: str = "ok"

    @property
    def score_label(self) -> str:
        return "n/a" if self.cvss_score is None else f"{self.cvss_score:.1f}"


@dataclass(frozen=True)
class OverviewRow:
    address: str
    os_guess: str
    open_ports: tuple[str, ...]
    cve_ids: tuple[str, ...]


@dataclass(frozen=True)
class ReportModel:
    engagement: dict
    scope: dict
    executive_summary: str
    overview_rows: tuple[OverviewRow, ...]
    findings: tuple[FindingEntry, ...]
    notices: tuple[str, ...] = ()
    appendix: tuple[ExploitRow, ...] = field(default=())

    @classmethod
    def field_names(cls) -> set[str]:
        return set(cls.__dataclass_fields__)


def assessment_date(assessment: AssessmentContext) -> str:
    """Latest host scan time; keeps the report reproducible for a given scan."""
    latest = max((h.scanned_at for h in assessment.hosts), default=datetime(1970, 1, 1, tzinfo=timezone.utc))
    return format_timestamp(latest)


def build_report_model(
    assessment: AssessmentContext,
    summary: str,
    narratives: list[FindingNarrative],
    project_name: str = "",
    notices: tuple[str, ...] = (),
) -> ReportModel:
    known = set(assessment.cve_ids())
    by_cve: dict[str, FindingNarrative] = {}
    for narrative in narratives:
        if narrative.cve_id not in known:
            raise InconsistentInput(f"narrative for {narrative.cve_id}, which is not in the assessment")
        by_cve[narrative.cve_id] = narrative

    hosts = sorted(assessment.hosts, key=lambda h: address_key(h.address))
    rows = tuple(
        OverviewRow(
            address=h.address,
            os_guess=h.os_guess or "unknown",
            open_ports=tuple(p.label for p in h.ports),
            cve_ids=tuple(h.cve_ids()),
        )
        for h in hosts
    )

    findings = []
    appendix: dict[int, ExploitRow] = {}
    for cve_id in sorted(known):
        record = assessment.record(cve_id)
        narrative = by_cve.get(cve_id)
        exploits = []
        for ref in assessment.exploits.get(cve_id, []):
            row = ExploitRow(
                exploit_id=ref.entry.exploit_id,
                title=ref.entry.title,
                platform=ref.entry.platform,
                verified=ref.entry.verified,
                language=ref.language,
                local_path=ref.local_path,
                compile_command=ref.compile_spec.command_line if ref.compile_spec else None,
            )
            exploits.append(row)
            appendix.setdefault(row.exploit_id, row)
        findings.append(
            FindingEntry(
                cve_id=cve_id,
                title=record.first_sentence or "No description available",
                description=record.description or "No description available from the vulnerability database.",
                severity=record.severity,
                cvss_score=record.cvss_score,
                cvss_vector=record.cvss_vector,
                severity_rationale=narrative.severity_rationale if narrative else PENDING,
                affected=tuple((a, f"{p}/{proto}") for a, p, proto in assessment.affected(cve_id)),
                exploits=tuple(exploits),
                remediation_steps=narrative.remediation_steps if narrative else (PENDING,),
                status=narrative.status if narrative else "pending",
            )
        )
    findings.sort(key=lambda f: SEVERITY_RANK[f.severity], reverse=True)

    if assessment.targets is not None:
        scope = {
            "addresses": list(assessment.targets.addresses),
            "ports": assessment.targets.port_argument(),
        }
    else:
        scope = {"addresses": [h.address for h in hosts], "ports": "as scanned"}

    return ReportModel(
        engagement={
            "project_name": project_name,
            "generated_at": assessment_date(assessment),
            "tool_version": __version__,
        },
        scope=scope,
        executive_summary=summary,
        overview_rows=rows,
        findings=tuple(findings),
        notices=tuple(notices),
        appendix=tuple(appendix[k] for k in sorted(appendix)),
    )
