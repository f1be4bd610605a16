"""Network reconnaissance: nmap command planning and XML output parsing."""

from __future__ import annotations

import logging
import shutil
import subprocess
import time
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterable, Protocol

from .errors import MalformedXml, ScanFailed, ScannerNotFound, UnsupportedSchema
from .models import CVE_PATTERN, HostRecon, PortService, TargetSpec, address_key, compress_ports

logger = logging.getLogger(__name__)

PHASES = ("port-discovery", "service-version", "vuln-script", "os-discovery")
OPEN_PORTS = "{open_ports}"
VULN_SCRIPT = "vulners"

PhaseCallback = Callable[[str, float], None]


@dataclass(frozen=True)
class ScanCommandPlan:
    phases: tuple[tuple[str, tuple[str, ...]], ...]

    def __post_init__(self):
        if tuple(name for name, _ in self.phases) != PHASES:
            raise ValueError(f"plan phases must be exactly {PHASES}")
        if any(not argv for _, argv in self.phases):
            raise ValueError("phase argument vectors must not be empty")

    def argv(self, phase: str, open_ports: str | None = None) -> list[str]:
        args = dict(self.phases)[phase]
        if open_ports is None:
            return list(args)
        return [a.replace(OPEN_PORTS, open_ports) for a in args]


def build_scan_plan(targets: TargetSpec, binary: str = "nmap") -> ScanCommandPlan:
    """Return the four nmap invocations for ``targets``.

    Phases 2-4 carry the ``{open_ports}`` placeholder, which the caller
    replaces with the ports phase 1 found open.
    """
    addrs = list(targets.addresses)
    common = ["-Pn", "-n", "-oX", "-"]
    return ScanCommandPlan(
        (
            ("port-discovery", (binary, *common, "--open", "-p", targets.port_argument(), *addrs)),
            ("service-version", (binary, *common, "-sV", "-p", OPEN_PORTS, *addrs)),
            ("vuln-script", (binary, *common, "-sV", "--script", VULN_SCRIPT, "-p", OPEN_PORTS, *addrs)),
            ("os-discovery", (binary, *common, "-O", "-p", OPEN_PORTS, *addrs)),
        )
    )


# ---------------------------------------------------------------------------
# XML parsing


def parse_scan_xml(xml: bytes) -> list[HostRecon]:
    try:
        root = ET.fromstring(xml)
    except ET.ParseError as exc:
        raise MalformedXml(f"scanner output is not well-formed XML: {exc}") from None
    if root.tag != "nmaprun":
        raise UnsupportedSchema(f"unexpected root element <{root.tag}>, expected <nmaprun>")

    run_start = _epoch(root.get("start"))
    hosts = []
    for host_el in root.findall("host"):
        status = host_el.find("status")
        if status is None or status.get("state") != "up":
            continue
        address = _ipv4_address(host_el)
        if address is None:
            continue
        scanned_at = _epoch(host_el.get("starttime")) or run_start or datetime(1970, 1, 1, tzinfo=timezone.utc)
        ports = [p for p in (_parse_port(el) for el in host_el.findall("ports/port")) if p is not None]
        hosts.append(
            HostRecon(
                address=address,
                os_guess=_best_os_match(host_el),
                ports=tuple(_merge_ports(ports)),
                scanned_at=scanned_at,
            )
        )
    return merge_hosts(hosts)


def _epoch(value: str | None) -> datetime | None:
    if not value or not value.isdigit():
        return None
    return datetime.fromtimestamp(int(value), tz=timezone.utc)


def _ipv4_address(host_el: ET.Element) -> str | None:
    for addr in host_el.findall("address"):
        if addr.get("addrtype", "ipv4") == "ipv4":
            return addr.get("addr")
    return None


def _best_os_match(host_el: ET.Element) -> str | None:
    best = None
    best_accuracy = -1
    for match in host_el.findall("os/osmatch"):
        try:
            accuracy = int(match.get("accuracy", "0"))
        except ValueError:
            accuracy = 0
        if accuracy > best_accuracy and match.get("name"):
            best, best_accuracy = match.get("name"), accuracy
    return best


def _parse_port(port_el: ET.Element) -> PortService | None:
    state_el = port_el.find("state")
    state = state_el.get("state") if state_el is not None else ""
    if state == "open|filtered":
        state = "filtered"
    if state not in ("open", "filtered"):
        return None
    service = port_el.find("service")
    attrs = service.attrib if service is not None else {}
    cves: dict[str, None] = {}
    for script in port_el.findall("script"):
        if script.get("id") == VULN_SCRIPT:
            for cve in vulners_ids(script):
                cves.setdefault(cve, None)
    return PortService(
        port=int(port_el.get("portid", "0")),
        protocol=port_el.get("protocol", "tcp"),
        state=state,
        service_name=attrs.get("name", ""),
        product=attrs.get("product", ""),
        version=attrs.get("version", ""),
        cve_ids=tuple(cves),
    )


def vulners_ids(script: ET.Element) -> Iterable[str]:
    """Yield the CVE identifiers from a vulners script result table."""
    for row in script.iter("table"):
        for elem in row.findall("elem"):
            if elem.get("key") == "id" and elem.text:
                ident = elem.text.strip()
                if CVE_PATTERN.fullmatch(ident):
                    yield ident.upper()


def _merge_ports(ports: Iterable[PortService]) -> list[PortService]:
    merged: dict[tuple[int, str], PortService] = {}
    for port in ports:
        key = (port.port, port.protocol)
        prev = merged.get(key)
        if prev is None:
            merged[key] = port
            continue
        cves = dict.fromkeys(prev.cve_ids)
        cves.update(dict.fromkeys(port.cve_ids))
        merged[key] = PortService(
            port=port.port,
            protocol=port.protocol,
            state="open" if "open" in (prev.state, port.state) else port.state,
            service_name=port.service_name or prev.service_name,
            product=port.product or prev.product,
            version=port.version or prev.version,
            cve_ids=tuple(cves),
        )
    return list(merged.values())


def merge_hosts(hosts: Iterable[HostRecon]) -> list[HostRecon]:
    """Combine records of the same address (e.g. from separate scan phases)."""
    by_addr: dict[str, HostRecon] = {}
    for host in hosts:
        prev = by_addr.get(host.address)
        if prev is None:
            by_addr[host.address] = host
            continue
        by_addr[host.address] = HostRecon(
            address=host.address,
            os_guess=host.os_guess or prev.os_guess,
            ports=tuple(_merge_ports([*prev.ports, *host.ports])),
            scanned_at=min(prev.scanned_at, host.scanned_at),
        )
    return sorted(by_addr.values(), key=lambda h: address_key(h.address))


# ---------------------------------------------------------------------------
# backends


class ScannerBackend(Protocol):
    def run(self, targets: TargetSpec, on_phase: PhaseCallback | None = None) -> list[HostRecon]: ...


class FixtureBackend:
    """Replays a stored scanner XML capture.

    The whole parse is reported against the port-discovery phase; the
    remaining phases did not execute and are reported as zero.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.calls = 0

    def run(self, targets: TargetSpec, on_phase: PhaseCallback | None = None) -> list[HostRecon]:
        self.calls += 1
        started = time.perf_counter()
        hosts = parse_scan_xml(self.path.read_bytes())
        if on_phase:
            on_phase("port-discovery", time.perf_counter() - started)
            for phase in PHASES[1:]:
                on_phase(phase, 0.0)
        return hosts


class NmapBackend:
    """Runs the nmap binary phase by phase."""

    def __init__(self, binary: str = "nmap", runner: Callable[..., subprocess.CompletedProcess] = subprocess.run):
        self.binary = binary
        self.runner = runner
        self.calls = 0

    def run(self, targets: TargetSpec, on_phase: PhaseCallback | None = None) -> list[HostRecon]:
        self.calls += 1
        resolved = shutil.which(self.binary)
        if resolved is None:
            raise ScannerNotFound(self.binary)
        plan = build_scan_plan(targets, binary=resolved)

        hosts = self._phase(plan, "port-discovery", None, on_phase)
        open_ports = sorted({p.port for h in hosts for p in h.ports if p.state == "open"})
        if not open_ports:
            for phase in PHASES[1:]:
                if on_phase:
                    on_phase(phase, 0.0)
            return hosts
        port_arg = compress_ports(open_ports)
        collected = list(hosts)
        for phase in PHASES[1:]:
            try:
                collected.extend(self._phase(plan, phase, port_arg, on_phase))
            except ScanFailed as exc:
                # OS fingerprinting needs raw sockets; the rest of the scan is still useful
                if phase != "os-discovery":
                    raise
                logger.warning("OS discovery skipped: %s", exc)
        return merge_hosts(collected)

    def _phase(self, plan, phase, port_arg, on_phase):
        argv = plan.argv(phase, port_arg)
        logger.info("running %s: %s", phase, " ".join(argv))
        started = time.perf_counter()
        proc = self.runner(argv, capture_output=True)
        if on_phase:
            on_phase(phase, time.perf_counter() - started)
        if proc.returncode != 0:
            stderr = proc.stderr.decode(errors="replace") if isinstance(proc.stderr, bytes) else str(proc.stderr)
            raise ScanFailed(phase, proc.returncode, stderr)
        return parse_scan_xml(proc.stdout)


def scan(targets: TargetSpec, backend: ScannerBackend, on_phase: PhaseCallback | None = None) -> list[HostRecon]:
    return backend.run(targets, on_phase)
