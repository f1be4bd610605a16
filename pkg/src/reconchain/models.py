"""Domain records passed between stages, with their JSON (de)serialisation.

Records are frozen dataclasses holding tuples so they can be shared between
threads. ``to_dict``/``from_dict`` produce plain JSON-compatible values; the
orchestrator is responsible for canonical encoding on disk.
"""

from __future__ import annotations

import ipaddress
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any

from .errors import InvalidCveId, InvalidTarget

CVE_PATTERN = re.compile(r"CVE-\d{4}-\d{4,}", re.IGNORECASE)

SEVERITIES = ("none", "low", "medium", "high", "critical")
SEVERITY_RANK = {name: rank for rank, name in enumerate(SEVERITIES)}

LANGUAGES = ("python", "ruby", "metasploit", "c", "cpp", "java", "shell", "perl", "php", "text", "unknown")

STAGES = ("scan", "enrich", "exploit", "narrate", "report")
STAGE_STATES = ("pending", "done", "degraded")

SCHEMA_VERSION = 1


def normalize_cve(value: str) -> str:
    """Upper-case ``value`` and check it is a CVE identifier."""
    cve = value.strip().upper()
    if not CVE_PATTERN.fullmatch(cve):
        raise InvalidCveId(f"not a CVE identifier: {value!r}")
    return cve


def is_cve(value: str) -> bool:
    return CVE_PATTERN.fullmatch(value.strip()) is not None


def format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def parse_timestamp(text: str) -> datetime:
    return datetime.strptime(text, "%Y-%m-%dT%H:%M:%SZ").replace(tzinfo=timezone.utc)


def address_key(address: str) -> tuple[int, str]:
    try:
        return (int(ipaddress.IPv4Address(address)), address)
    except ValueError:
        return (-1, address)


# ---------------------------------------------------------------------------
# targets


@dataclass(frozen=True)
class TargetSpec:
    addresses: tuple[str, ...]
    ports: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if not self.addresses:
            raise InvalidTarget("at least one target address is required")
        if not self.ports:
            raise InvalidTarget("at least one port is required")
        for addr in self.addresses:
            _check_address(addr)
        for low, high in self.ports:
            if not (1 <= low <= 65535 and 1 <= high <= 65535):
                raise InvalidTarget(f"port out of range 1-65535: {low}-{high}")
            if low > high:
                raise InvalidTarget(f"port range is reversed: {low}-{high}")

    @classmethod
    def parse(cls, addresses: str, ports: str) -> "TargetSpec":
        """Build a spec from CLI-style strings such as ``10.0.0.0/24`` and ``22,80,1000-2000``."""
        addrs = tuple(a.strip() for a in addresses.split(",") if a.strip())
        ranges = []
        for chunk in ports.split(","):
            chunk = chunk.strip()
            if not chunk:
                continue
            low, sep, high = chunk.partition("-")
            try:
                lo = int(low)
                hi = int(high) if sep else lo
            except ValueError:
                raise InvalidTarget(f"malformed port specification: {chunk!r}") from None
            ranges.append((lo, hi))
        return cls(addrs, tuple(ranges))

    def expand_ports(self) -> list[int]:
        ports: set[int] = set()
        for low, high in self.ports:
            ports.update(range(low, high + 1))
        return sorted(ports)

    def port_argument(self) -> str:
        """Compact, sorted, duplicate-free port list (adjacent ranges merged)."""
        return compress_ports(self.expand_ports())

    def to_dict(self) -> dict[str, Any]:
        return {"addresses": list(self.addresses), "ports": [list(r) for r in self.ports]}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "TargetSpec":
        return cls(tuple(data["addresses"]), tuple((int(lo), int(hi)) for lo, hi in data["ports"]))


def _check_address(addr: str) -> None:
    host, sep, prefix = addr.partition("/")
    try:
        ipaddress.IPv4Address(host)
    except ValueError:
        raise InvalidTarget(f"not an IPv4 address: {addr!r}") from None
    if sep:
        if not prefix.isdigit() or not 0 <= int(prefix) <= 32:
            raise InvalidTarget(f"CIDR prefix must be 0-32: {addr!r}")


def compress_ports(ports: list[int]) -> str:
    parts = []
    i = 0
    while i < len(ports):
        j = i
        while j + 1 < len(ports) and ports[j + 1] == ports[j] + 1:
            j += 1
        parts.append(str(ports[i]) if i == j else f"{ports[i]}-{ports[j]}")
        i = j + 1
    return ",".join(parts)


# ---------------------------------------------------------------------------
# reconnaissance


@dataclass(frozen=True)
class PortService:
    port: int
    protocol: str = "tcp"
    state: str = "open"
    service_name: str = ""
    product: str = ""
    version: str = ""
    cve_ids: tuple[str, ...] = ()

    def __post_init__(self):
        if not 1 <= self.port <= 65535:
            raise ValueError(f"port out of range: {self.port}")
        if self.protocol not in ("tcp", "udp"):
            raise ValueError(f"unknown protocol: {self.protocol}")
        if self.state not in ("open", "filtered"):
            raise ValueError(f"unsupported port state: {self.state}")
        ids = tuple(normalize_cve(c) for c in self.cve_ids)
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate CVE ids on port {self.port}")
        object.__setattr__(self, "cve_ids", ids)

    @property
    def label(self) -> str:
        return f"{self.port}/{self.protocol}"

    @property
    def service_line(self) -> str:
        return " ".join(p for p in (self.service_name, self.product, self.version) if p)

    def to_dict(self) -> dict[str, Any]:
        return {
            "port": self.port,
            "protocol": self.protocol,
            "state": self.state,
            "service_name": self.service_name,
            "product": self.product,
            "version": self.version,
            "cve_ids": list(self.cve_ids),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "PortService":
        return cls(
            port=int(data["port"]),
            protocol=data["protocol"],
            state=data["state"],
            service_name=data["service_name"],
            product=data["product"],
            version=data["version"],
            cve_ids=tuple(data["cve_ids"]),
        )


@dataclass(frozen=True)
class HostRecon:
    address: str
    ports: tuple[PortService, ...] = ()
    os_guess: str | None = None
    scanned_at: datetime = field(default_factory=lambda: datetime(1970, 1, 1, tzinfo=timezone.utc))

    def __post_init__(self):
        ports = tuple(sorted(self.ports, key=lambda p: (p.port, p.protocol)))
        keys = [(p.port, p.protocol) for p in ports]
        if len(set(keys)) != len(keys):
            raise ValueError(f"duplicate port entries for host {self.address}")
        object.__setattr__(self, "ports", ports)

    def cve_ids(self) -> list[str]:
        seen: dict[str, None] = {}
        for p in self.ports:
            for cve in p.cve_ids:
                seen.setdefault(cve, None)
        return list(seen)

    def to_dict(self) -> dict[str, Any]:
        return {
            "address": self.address,
            "os_guess": self.os_guess,
            "ports": [p.to_dict() for p in self.ports],
            "scanned_at": format_timestamp(self.scanned_at),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "HostRecon":
        return cls(
            address=data["address"],
            os_guess=data.get("os_guess"),
            ports=tuple(PortService.from_dict(p) for p in data["ports"]),
            scanned_at=parse_timestamp(data["scanned_at"]),
        )


# ---------------------------------------------------------------------------
# vulnerabilities


@dataclass(frozen=True)
class CveRecord:
    id: str
    description: str = ""
    cvss_score: float | None = None
    cvss_vector: str | None = None
    severity: str = "none"
    source: str = "unresolved"

    def __post_init__(self):
        object.__setattr__(self, "id", normalize_cve(self.id))
        if self.severity not in SEVERITIES:
            raise ValueError(f"unknown severity: {self.severity}")
        if self.source not in ("nvd", "cache", "unresolved"):
            raise ValueError(f"unknown source: {self.source}")
        if self.source == "unresolved" and (
            self.description or self.cvss_score is not None or self.severity != "none"
        ):
            raise ValueError("unresolved records carry no description, score or severity")

    @classmethod
    def unresolved(cls, cve_id: str) -> "CveRecord":
        return cls(id=cve_id)

    @property
    def first_sentence(self) -> str:
        return first_sentence(self.description)

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "description": self.description,
            "cvss_score": self.cvss_score,
            "cvss_vector": self.cvss_vector,
            "severity": self.severity,
            "source": self.source,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "CveRecord":
        score = data.get("cvss_score")
        return cls(
            id=data["id"],
            description=data["description"],
            cvss_score=None if score is None else float(score),
            cvss_vector=data.get("cvss_vector"),
            severity=data["severity"],
            source=data["source"],
        )


_SENTENCE_END = re.compile(r"(?<=[.!?])\s+(?=[A-Z(\"'])")


def first_sentence(text: str) -> str:
    text = " ".join(text.split())
    if not text:
        return ""
    return _SENTENCE_END.split(text, maxsplit=1)[0]


# ---------------------------------------------------------------------------
# exploits


@dataclass(frozen=True)
class IndexEntry:
    exploit_id: int
    file_path: str
    title: str
    date: str  # ISO yyyy-mm-dd
    author: str = ""
    platform: str = ""
    type: str = ""
    verified: bool = False
    codes: tuple[str, ...] = ()

    def __post_init__(self):
        if self.exploit_id <= 0:
            raise ValueError("exploit_id must be positive")
        if not self.file_path:
            raise ValueError("file_path must not be empty")
        object.__setattr__(self, "codes", tuple(c.strip().upper() for c in self.codes if c.strip()))

    def to_dict(self) -> dict[str, Any]:
        return {
            "exploit_id": self.exploit_id,
            "file_path": self.file_path,
            "title": self.title,
            "date": self.date,
            "author": self.author,
            "platform": self.platform,
            "type": self.type,
            "verified": self.verified,
            "codes": list(self.codes),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "IndexEntry":
        return cls(**{**data, "codes": tuple(data["codes"])})


@dataclass(frozen=True)
class CompileSpec:
    command_line: str
    source_of_truth: str

    def to_dict(self) -> dict[str, Any]:
        return {"command_line": self.command_line, "source_of_truth": self.source_of_truth}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "CompileSpec":
        return cls(data["command_line"], data["source_of_truth"])


@dataclass(frozen=True)
class ExploitRef:
    entry: IndexEntry
    local_path: str | None = None  # relative to the project directory
    language: str = "unknown"
    compile_spec: CompileSpec | None = None
    fetch_error: str | None = None

    def __post_init__(self):
        if self.language not in LANGUAGES:
            raise ValueError(f"unknown language tag: {self.language}")
        if self.compile_spec is not None and self.language not in ("c", "cpp"):
            raise ValueError("compile specs only apply to C/C++ sources")

    def to_dict(self) -> dict[str, Any]:
        return {
            "entry": self.entry.to_dict(),
            "local_path": self.local_path,
            "language": self.language,
            "compile_spec": None if self.compile_spec is None else self.compile_spec.to_dict(),
            "fetch_error": self.fetch_error,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ExploitRef":
        spec = data.get("compile_spec")
        return cls(
            entry=IndexEntry.from_dict(data["entry"]),
            local_path=data.get("local_path"),
            language=data["language"],
            compile_spec=None if spec is None else CompileSpec.from_dict(spec),
            fetch_error=data.get("fetch_error"),
        )


# ---------------------------------------------------------------------------
# narratives


@dataclass(frozen=True)
class FindingNarrative:
    cve_id: str
    severity_rationale: str
    remediation_steps: tuple[str, ...]
    provider_model: str
    status: str = "ok"  # ok | degraded | rejected
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "cve_id", normalize_cve(self.cve_id))
        if not self.remediation_steps:
            raise ValueError("a narrative needs at least one remediation step")
        if self.status not in ("ok", "degraded", "rejected"):
            raise ValueError(f"unknown narrative status: {self.status}")

    @property
    def text(self) -> str:
        return "\n".join((self.severity_rationale, *self.remediation_steps))

    def to_dict(self) -> dict[str, Any]:
        return {
            "cve_id": self.cve_id,
            "severity_rationale": self.severity_rationale,
            "remediation_steps": list(self.remediation_steps),
            "provider_model": self.provider_model,
            "status": self.status,
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "FindingNarrative":
        return cls(
            cve_id=data["cve_id"],
            severity_rationale=data["severity_rationale"],
            remediation_steps=tuple(data["remediation_steps"]),
            provider_model=data["provider_model"],
            status=data.get("status", "ok"),
            notes=tuple(data.get("notes", ())),
        )


# ---------------------------------------------------------------------------
# cumulative state


def _pending_stages() -> dict[str, str]:
    return {stage: "pending" for stage in STAGES}


@dataclass
class AssessmentContext:
    """Everything the pipeline knows so far, handed from stage to stage."""

    targets: TargetSpec | None = None
    hosts: list[HostRecon] = field(default_factory=list)
    vulnerabilities: dict[str, CveRecord] = field(default_factory=dict)
    exploits: dict[str, list[ExploitRef]] = field(default_factory=dict)
    stage_status: dict[str, str] = field(default_factory=_pending_stages)
    schema_version: int = SCHEMA_VERSION

    def membership(self) -> dict[tuple[str, int, str], list[str]]:
        """CVE ids keyed by (address, port, protocol)."""
        return {
            (h.address, p.port, p.protocol): list(p.cve_ids)
            for h in self.hosts
            for p in h.ports
        }

    def cve_ids(self) -> list[str]:
        """Distinct CVE ids in host/port order of first appearance."""
        seen: dict[str, None] = {}
        for host in self.hosts:
            for cve in host.cve_ids():
                seen.setdefault(cve, None)
        return list(seen)

    def record(self, cve_id: str) -> CveRecord:
        return self.vulnerabilities.get(cve_id) or CveRecord.unresolved(cve_id)

    def affected(self, cve_id: str) -> list[tuple[str, int, str]]:
        return [
            (h.address, p.port, p.protocol)
            for h in sorted(self.hosts, key=lambda h: address_key(h.address))
            for p in h.ports
            if cve_id in p.cve_ids
        ]

    def check_invariants(self) -> list[str]:
        """Return a list of violated invariants (empty when consistent)."""
        problems = []
        if self.stage_status.get("enrich", "pending") != "pending":
            for cve in self.cve_ids():
                if cve not in self.vulnerabilities:
                    problems.append(f"{cve} is referenced by a host but missing from vulnerabilities")
        for cve in self.exploits:
            if cve not in self.vulnerabilities:
                problems.append(f"exploits listed for {cve} which is not in vulnerabilities")
        for key, record in self.vulnerabilities.items():
            if key != record.id:
                problems.append(f"vulnerabilities key {key} does not match record id {record.id}")
        for stage, state in self.stage_status.items():
            if stage not in STAGES or state not in STAGE_STATES:
                problems.append(f"invalid stage status {stage}={state}")
        return problems

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": self.schema_version,
            "targets": None if self.targets is None else self.targets.to_dict(),
            "hosts": [h.to_dict() for h in self.hosts],
            "vulnerabilities": {k: v.to_dict() for k, v in self.vulnerabilities.items()},
            "exploits": {k: [e.to_dict() for e in v] for k, v in self.exploits.items()},
            "membership": [
                {"address": a, "port": p, "protocol": proto, "cve_ids": ids}
                for (a, p, proto), ids in self.membership().items()
            ],
            "stage_status": dict(self.stage_status),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "AssessmentContext":
        targets = data.get("targets")
        return cls(
            targets=None if targets is None else TargetSpec.from_dict(targets),
            hosts=[HostRecon.from_dict(h) for h in data["hosts"]],
            vulnerabilities={k: CveRecord.from_dict(v) for k, v in data["vulnerabilities"].items()},
            exploits={k: [ExploitRef.from_dict(e) for e in v] for k, v in data["exploits"].items()},
            stage_status={**_pending_stages(), **data["stage_status"]},
            schema_version=int(data["schema_version"]),
        )
