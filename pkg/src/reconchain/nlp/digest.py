"""Terse line-oriented digest of an assessment, sized to a token budget."""

from __future__ import annotations

import math

from ..errors import BudgetTooSmall
from ..models import SEVERITY_RANK, AssessmentContext, address_key

NO_FINDINGS = "NO HOSTS: the assessment produced no findings"


def estimate_tokens(text: str) -> int:
    return math.ceil(len(text) / 4)


def _clip(text: str, limit: int | None) -> str:
    if limit is None or len(text) <= limit:
        return text
    if limit < 4:
        return ""
    return text[: limit - 3].rstrip() + "..."


def render_digest(
    assessment: AssessmentContext,
    description_limit: int | None = None,
    exploit_titles: bool = True,
    cves_per_port: int | None = None,
) -> str:
    if not assessment.hosts:
        return NO_FINDINGS
    lines = []
    for host in sorted(assessment.hosts, key=lambda h: address_key(h.address)):
        lines.append(f"HOST {host.address}" + (f" os={host.os_guess}" if host.os_guess else ""))
        for port in host.ports:
            lines.append(f" PORT {port.label} {port.service_line}".rstrip())
            records = sorted((assessment.record(c) for c in port.cve_ids), key=lambda r: r.id)
            records.sort(key=lambda r: SEVERITY_RANK[r.severity], reverse=True)
            shown = records if cves_per_port is None else records[:cves_per_port]
            for record in shown:
                score = "n/a" if record.cvss_score is None else f"{record.cvss_score:.1f}"
                parts = [f"  {record.id} {record.severity} {score}"]
                desc = _clip(record.first_sentence, description_limit)
                if desc:
                    parts.append(desc)
                refs = assessment.exploits.get(record.id, [])
                exploit_part = f"exploits={len(refs)}"
                if exploit_titles and refs:
                    exploit_part += ": " + "; ".join(r.entry.title for r in refs)
                parts.append(exploit_part)
                lines.append(" | ".join(parts))
            elided = records[len(shown):]
            if elided:
                lines.append(f"  +{len(elided)} more: " + " ".join(r.id for r in elided))
    return "\n".join(lines)


def compact_context(assessment: AssessmentContext, budget: int) -> str:
    """Digest fitting ``budget`` estimated tokens (characters / 4).

    Reductions are applied in order: shorten descriptions, drop exploit
    titles, then fold CVE lines beyond a per-port cap into a bare id list.
    Host addresses and CVE ids are always kept.
    """
    if budget <= 0:
        raise ValueError("budget must be positive")

    def fits(text: str) -> bool:
        return estimate_tokens(text) <= budget

    skeleton = render_digest(assessment, description_limit=0, exploit_titles=False, cves_per_port=0)
    if not fits(skeleton):
        raise BudgetTooSmall(budget, estimate_tokens(skeleton))

    full = render_digest(assessment)
    if fits(full):
        return full

    longest = max(
        (len(assessment.record(c).first_sentence) for c in assessment.cve_ids()),
        default=0,
    )
    best = _largest_fitting(0, longest, lambda n: fits(render_digest(assessment, description_limit=n)))
    if best is not None:
        return render_digest(assessment, description_limit=best)

    if fits(render_digest(assessment, description_limit=0, exploit_titles=False)):
        best = _largest_fitting(
            0, longest,
            lambda n: fits(render_digest(assessment, description_limit=n, exploit_titles=False)),
        )
        return render_digest(assessment, description_limit=best, exploit_titles=False)

    widest = max((len(p.cve_ids) for h in assessment.hosts for p in h.ports), default=0)
    cap = _largest_fitting(
        0, widest,
        lambda k: fits(render_digest(assessment, description_limit=0, exploit_titles=False, cves_per_port=k)),
    )
    return render_digest(assessment, description_limit=0, exploit_titles=False, cves_per_port=cap)


def _largest_fitting(low: int, high: int, ok) -> int | None:
    """Largest n in [low, high] with ok(n), assuming ok is monotone decreasing."""
    if not ok(low):
        return None
    while low < high:
        mid = (low + high + 1) // 2
        if ok(mid):
            low = mid
        else:
            high = mid - 1
    return low
