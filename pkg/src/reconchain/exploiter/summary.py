"""Operator-facing console view of an exploit-annotated assessment."""

from __future__ import annotations

from pathlib import Path

from ..models import SEVERITY_RANK, AssessmentContext, address_key

DESCRIPTION_WIDTH = 80


def _truncate(text: str, width: int = DESCRIPTION_WIDTH) -> str:
    text = " ".join(text.split())
    return text if len(text) <= width else text[: width - 3].rstrip() + "..."


def console_summary(assessment: AssessmentContext, base_dir: str | Path | None = None) -> str:
    lines = ["=== Exploitation summary ==="]
    if not assessment.hosts:
        lines.append("no hosts")
        return "\n".join(lines) + "\n"

    for host in sorted(assessment.hosts, key=lambda h: address_key(h.address)):
        lines.append("")
        lines.append(f"Host {host.address}" + (f"  [{host.os_guess}]" if host.os_guess else ""))
        open_ports = ", ".join(p.label for p in host.ports) or "none"
        lines.append(f"  Open ports: {open_ports}")
        for port in host.ports:
            lines.append(f"  {port.label}  {port.service_line or '-'}")
            records = [assessment.record(c) for c in port.cve_ids]
            records.sort(key=lambda r: r.id)
            records.sort(key=lambda r: SEVERITY_RANK[r.severity], reverse=True)
            if not records:
                lines.append("    (no CVEs)")
            for record in records:
                score = "n/a" if record.cvss_score is None else f"{record.cvss_score:.1f}"
                desc = _truncate(record.description) if record.description else "(no description available)"
                lines.append(f"    {record.id}  [{record.severity.upper()} {score}]  {desc}")
                refs = assessment.exploits.get(record.id, [])
                if not refs:
                    lines.append("      (no public exploits found)")
                for ref in refs:
                    e = ref.entry
                    verified = "verified" if e.verified else "unverified"
                    if ref.local_path is None:
                        where = "not downloaded"
                    elif base_dir is not None:
                        where = str(Path(base_dir) / ref.local_path)
                    else:
                        where = ref.local_path
                    lines.append(
                        f"      exploit EDB-{e.exploit_id}  {e.title} | {e.platform or '?'} | "
                        f"{ref.language} | {verified} | {where}"
                    )
    return "\n".join(lines) + "\n"
