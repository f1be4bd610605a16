"""Executive summary and per-finding narratives produced by a completion provider."""

from __future__ import annotations

import logging
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from ..errors import ProviderError
from ..models import CVE_PATTERN, SEVERITY_RANK, AssessmentContext, FindingNarrative
from .digest import compact_context
from .prompts import PromptTemplate, load_prompts
from .providers import CompletionProvider, ProviderParams

logger = logging.getLogger(__name__)

MAX_ATTEMPTS = 3
DEFAULT_BUDGET = 12_000
DEFAULT_WORKERS = 4
PENDING = "Pending analyst review."

_STEP = re.compile(r"^\s*(?:[-*•]|\d+[.)])\s+(?P<text>.+)$")


def _complete(provider: CompletionProvider, context: str, user: str, params: ProviderParams) -> str:
    last: Exception | None = None
    for attempt in range(1, MAX_ATTEMPTS + 1):
        try:
            return provider.complete(context, user, params)
        except (ProviderError, TimeoutError) as exc:
            last = exc
            logger.warning("completion attempt %d/%d failed: %s", attempt, MAX_ATTEMPTS, exc)
    raise ProviderError(f"provider failed after {MAX_ATTEMPTS} attempts: {last}")


def generate_executive_summary(
    assessment: AssessmentContext,
    provider: CompletionProvider,
    params: ProviderParams,
    prompts: dict[str, PromptTemplate] | None = None,
    budget: int = DEFAULT_BUDGET,
) -> str:
    prompts = prompts or load_prompts()
    context = prompts["executive_summary"].render(
        host_count=len(assessment.hosts),
        port_count=sum(len(h.ports) for h in assessment.hosts),
        cve_count=len(assessment.cve_ids()),
    )
    return _complete(provider, context, compact_context(assessment, budget), params)


def finding_digest(assessment: AssessmentContext, cve_id: str) -> str:
    """User message for one finding: its record, affected services and exploits only."""
    record = assessment.record(cve_id)
    score = "n/a" if record.cvss_score is None else f"{record.cvss_score:.1f}"
    lines = [
        f"CVE: {record.id}",
        f"Severity: {record.severity} (CVSS {score}{', ' + record.cvss_vector if record.cvss_vector else ''})",
        f"Description: {record.description or 'not available'}",
    ]
    services = {(h.address, p.port, p.protocol): p for h in assessment.hosts for p in h.ports}
    for address, port, proto in assessment.affected(cve_id):
        service = services[(address, port, proto)].service_line or "unknown service"
        lines.append(f"Affected: {address} {port}/{proto} {service}")
    refs = assessment.exploits.get(cve_id, [])
    if not refs:
        lines.append("Public exploits: none known")
    for ref in refs:
        e = ref.entry
        lines.append(
            f"Public exploit: EDB-{e.exploit_id} {e.title} "
            f"(platform {e.platform or 'unknown'}, {'verified' if e.verified else 'unverified'})"
        )
    return "\n".join(lines)


def parse_steps(text: str) -> list[str]:
    steps = [m.group("text").strip() for m in map(_STEP.match, text.splitlines()) if m]
    if steps:
        return steps
    return [text.strip()] if text.strip() else []


def _narrate(
    assessment: AssessmentContext,
    cve_id: str,
    provider: CompletionProvider,
    params: ProviderParams,
    prompts: dict[str, PromptTemplate],
) -> FindingNarrative:
    record = assessment.record(cve_id)
    user = finding_digest(assessment, cve_id)
    score = "n/a" if record.cvss_score is None else f"{record.cvss_score:.1f}"
    notes = []
    try:
        rationale = _complete(
            provider,
            prompts["finding_rationale"].render(cve_id=cve_id, severity=record.severity, cvss_score=score),
            user,
            params,
        ).strip()
    except ProviderError as exc:
        rationale = PENDING
        notes.append(f"severity rationale unavailable: {exc}")
    try:
        steps = parse_steps(
            _complete(provider, prompts["finding_remediation"].render(cve_id=cve_id), user, params)
        )
    except ProviderError as exc:
        steps = []
        notes.append(f"remediation steps unavailable: {exc}")
    if not steps:
        steps = [PENDING]
    if not rationale:
        rationale = PENDING
    return FindingNarrative(
        cve_id=cve_id,
        severity_rationale=rationale,
        remediation_steps=tuple(steps),
        provider_model=params.model_name,
        status="degraded" if notes else "ok",
        notes=tuple(notes),
    )


def generate_findings(
    assessment: AssessmentContext,
    provider: CompletionProvider,
    params: ProviderParams,
    prompts: dict[str, PromptTemplate] | None = None,
    max_workers: int = DEFAULT_WORKERS,
) -> list[FindingNarrative]:
    """One narrative per distinct CVE, each from its own pair of fresh conversations."""
    prompts = prompts or load_prompts()
    cve_ids = assessment.cve_ids()
    with ThreadPoolExecutor(max_workers=max(1, max_workers)) as pool:
        narratives = list(pool.map(lambda c: _narrate(assessment, c, provider, params, prompts), cve_ids))
    return sort_narratives(narratives, assessment)


def sort_narratives(narratives: list[FindingNarrative], assessment: AssessmentContext) -> list[FindingNarrative]:
    ordered = sorted(narratives, key=lambda n: n.cve_id)
    ordered.sort(key=lambda n: SEVERITY_RANK[assessment.record(n.cve_id).severity], reverse=True)
    return ordered


@dataclass(frozen=True)
class ValidationResult:
    valid: bool
    offenders: tuple[str, ...] = ()


def validate_narrative(narrative: FindingNarrative, assessment: AssessmentContext) -> ValidationResult:
    known = set(assessment.cve_ids()) | set(assessment.vulnerabilities)
    # ids quoted inside NVD descriptions are part of the supplied data, not inventions
    for record in assessment.vulnerabilities.values():
        known.update(m.upper() for m in CVE_PATTERN.findall(record.description or ""))
    mentioned = dict.fromkeys(m.upper() for m in CVE_PATTERN.findall(narrative.text))
    offenders = tuple(c for c in mentioned if c not in known)
    return ValidationResult(valid=not offenders, offenders=offenders)


def screen_narratives(
    narratives: list[FindingNarrative], assessment: AssessmentContext
) -> list[FindingNarrative]:
    """Replace narratives that cite CVEs outside the assessment with placeholders."""
    screened = []
    for narrative in narratives:
        result = validate_narrative(narrative, assessment)
        if result.valid:
            screened.append(narrative)
            continue
        logger.warning("narrative for %s cites unknown CVE(s): %s", narrative.cve_id, ", ".join(result.offenders))
        screened.append(
            FindingNarrative(
                cve_id=narrative.cve_id,
                severity_rationale=PENDING,
                remediation_steps=(PENDING,),
                provider_model=narrative.provider_model,
                status="rejected",
                notes=(*narrative.notes, "generated text cited unknown CVE(s): " + ", ".join(result.offenders)),
            )
        )
    return screened
