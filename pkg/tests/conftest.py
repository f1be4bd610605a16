import socket
from datetime import datetime, timezone
from pathlib import Path

import pytest

from reconchain.enricher import severity_from_score
from reconchain.models import (
    AssessmentContext,
    CveRecord,
    HostRecon,
    IndexEntry,
    PortService,
    TargetSpec,
)
from reconchain.orchestrator import Settings

FIXTURES = Path(__file__).parent / "fixtures"
T0 = datetime(2023, 8, 1, 8, 0, tzinfo=timezone.utc)


def record(cve_id, score, description=None):
    return CveRecord(
        id=cve_id,
        description=description if description is not None else f"Issue {cve_id} in a network service. More text.",
        cvss_score=score,
        cvss_vector=None if score is None else "CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H",
        severity=severity_from_score(score),
        source="cache",
    )


def entry(exploit_id, title, codes=(), verified=True, date="2017-05-17", path=None, platform="linux"):
    return IndexEntry(
        exploit_id=exploit_id,
        file_path=path or f"exploits/{platform}/remote/{exploit_id}.py",
        title=title,
        date=date,
        author="tester",
        platform=platform,
        type="remote",
        verified=verified,
        codes=tuple(codes),
    )


def make_context(layout, scores=None, exploits=None, descriptions=None):
    """Context from ``{address: {port: [cve ids]}}``; every CVE gets a cached record."""
    scores = scores or {}
    descriptions = descriptions or {}
    hosts = []
    for i, (address, ports) in enumerate(layout.items()):
        services = tuple(
            PortService(port=port, service_name="svc", product="Daemon", version=str(port), cve_ids=tuple(cves))
            for port, cves in ports.items()
        )
        hosts.append(HostRecon(address=address, ports=services, os_guess="Linux 4.x", scanned_at=T0.replace(minute=i)))
    ctx = AssessmentContext(targets=TargetSpec.parse(",".join(layout), "1-65535"), hosts=hosts)
    for cve_id in ctx.cve_ids():
        ctx.vulnerabilities[cve_id] = record(cve_id, scores.get(cve_id, 7.5), descriptions.get(cve_id))
    ctx.exploits = {c: list(refs) for c, refs in (exploits or {}).items()}
    for stage in ("scan", "enrich", "exploit"):
        ctx.stage_status[stage] = "done"
    return ctx


def many_cves(n):
    """Context with ``n`` distinct CVEs spread over three hosts, one shared."""
    ids = [f"CVE-2020-{1000 + i}" for i in range(n)]
    layout = {
        "10.0.0.1": {80: ids[0::3], 443: ids[1::3]},
        "10.0.0.2": {22: ids[2::3] + ids[:1]},
        "10.0.0.3": {8080: ids[:1]},
    }
    scores = {c: round(1.0 + (i * 0.37) % 9.0, 1) for i, c in enumerate(ids)}
    return make_context(layout, scores)


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def offline_settings(tmp_path):
    """Settings that keep every run inside tmp_path regardless of the caller's environment."""
    return Settings({"projects_dir": str(tmp_path / "projects"), "nvd_cache_dir": str(tmp_path / "nvd")})


@pytest.fixture
def clean_env(monkeypatch, tmp_path):
    from reconchain.orchestrator.config import SETTING_KEYS

    for key in SETTING_KEYS:
        monkeypatch.delenv(key.upper(), raising=False)
    monkeypatch.setenv("NVD_CACHE_DIR", str(tmp_path / "nvd"))
    monkeypatch.chdir(tmp_path)
    return tmp_path


@pytest.fixture
def no_network(monkeypatch):
    """Fail any attempt to open a network connection and record it."""
    attempts = []

    def deny(*args, **kwargs):
        attempts.append(args)
        raise OSError("network access denied by test harness")

    monkeypatch.setattr(socket.socket, "connect", deny)
    monkeypatch.setattr(socket.socket, "connect_ex", deny)
    monkeypatch.setattr(socket, "create_connection", deny)
    monkeypatch.setattr(socket, "getaddrinfo", deny)
    return attempts


# ---- acceptance reporting: one PASS/FAIL line per criterion in the terminal summary

_acceptance = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (report.when != "call" and report.passed):
        return
    number, title = mark.args
    previous = _acceptance.get(number, (title, True))[1]
    _acceptance[number] = (title, previous and report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_acceptance):
        title, passed = _acceptance[number]
        terminalreporter.write_line(f"AC{number} {'PASS' if passed else 'FAIL'}: {title}")
