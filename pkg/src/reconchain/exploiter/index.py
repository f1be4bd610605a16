"""Offline ExploitDB index (files_exploits.csv style) and CVE lookup."""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from datetime import date

from ..errors import MalformedIndex
from ..models import IndexEntry, normalize_cve

logger = logging.getLogger(__name__)

REQUIRED_COLUMNS = ("id", "file", "description", "date", "author", "type", "platform", "verified", "codes")

# column names used by the upstream snapshot that map onto ours
_ALIASES = {"date_published": "date"}


@dataclass
class ExploitIndex:
    entries: list[IndexEntry]
    snapshot_date: date | None = None
    skipped: int = 0
    _by_code: dict[str, list[IndexEntry]] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        ids = [e.exploit_id for e in self.entries]
        if len(set(ids)) != len(ids):
            raise MalformedIndex("duplicate exploit ids in index")
        for entry in self.entries:
            for code in entry.codes:
                self._by_code.setdefault(code, []).append(entry)

    def __len__(self) -> int:
        return len(self.entries)

    def by_code(self, code: str) -> list[IndexEntry]:
        return list(self._by_code.get(code.upper(), ()))


def load_index(data: bytes, snapshot_date: date | None = None) -> ExploitIndex:
    text = data.decode("utf-8", errors="replace")
    reader = csv.DictReader(io.StringIO(text, newline=""))
    header = [_ALIASES.get(h.strip(), h.strip()) for h in (reader.fieldnames or [])]
    missing = [c for c in REQUIRED_COLUMNS if c not in header]
    if missing:
        raise MalformedIndex(f"index is missing required column(s): {', '.join(missing)}")
    reader.fieldnames = header

    entries = []
    skipped = 0
    seen: set[int] = set()
    for row in reader:
        try:
            exploit_id = int(row["id"])
            if exploit_id <= 0 or exploit_id in seen or not row["file"]:
                raise ValueError(row["id"])
        except (TypeError, ValueError):
            skipped += 1
            continue
        seen.add(exploit_id)
        codes = tuple(c for c in (row.get("codes") or "").split(";") if c.strip())
        entries.append(
            IndexEntry(
                exploit_id=exploit_id,
                file_path=row["file"].strip(),
                title=(row["description"] or "").strip(),
                date=(row["date"] or "").strip(),
                author=(row["author"] or "").strip(),
                platform=(row["platform"] or "").strip(),
                type=(row["type"] or "").strip(),
                verified=(row["verified"] or "").strip() == "1",
                codes=codes,
            )
        )
    if skipped:
        logger.info("skipped %d index row(s) with unusable ids", skipped)
    if snapshot_date is None:
        snapshot_date = _latest_date(entries)
    return ExploitIndex(entries, snapshot_date=snapshot_date, skipped=skipped)


def _latest_date(entries: list[IndexEntry]) -> date | None:
    dates = []
    for e in entries:
        try:
            dates.append(date.fromisoformat(e.date))
        except ValueError:
            pass
    return max(dates, default=None)


def search(index: ExploitIndex, cve: str) -> list[IndexEntry]:
    """Entries tagged with ``cve`` plus entries naming it in their title.

    Ordered verified first, then newest, then by id.
    """
    cve = normalize_cve(cve)
    found = {e.exploit_id: e for e in index.by_code(cve)}
    for entry in index.entries:
        if cve in entry.title.upper():
            found.setdefault(entry.exploit_id, entry)
    results = sorted(found.values(), key=lambda e: e.exploit_id)
    results.sort(key=lambda e: e.date, reverse=True)
    results.sort(key=lambda e: e.verified, reverse=True)
    return results


def is_framework_module(entry: IndexEntry) -> bool:
    """True when the index metadata marks the entry as a Metasploit module."""
    return "metasploit" in entry.title.lower() or "/metasploit/" in entry.file_path.lower()
