"""CVE enrichment against the NVD CVE API, with pacing and an on-disk cache."""

from __future__ import annotations

import json
import logging
import os
import threading
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterable

from .errors import ConfigError, OutOfRange
from .models import AssessmentContext, CveRecord, HostRecon, format_timestamp, normalize_cve

logger = logging.getLogger(__name__)

NVD_URL = "https://services.nvd.nist.gov/rest/json/cves/2.0"
API_VERSION = "2.0"

# NVD public rate limits: 50 requests / 30 s with a key, 5 / 30 s without.
KEYED_MIN_DELAY = 0.6
ANONYMOUS_MIN_DELAY = 6.0

# newest first
_METRIC_KEYS = ("cvssMetricV40", "cvssMetricV31", "cvssMetricV30", "cvssMetricV2")


def severity_from_score(score: float | None) -> str:
    """Qualitative CVSS band for a base score (None means no score)."""
    if score is None:
        return "none"
    if not 0.0 <= score <= 10.0:
        raise OutOfRange(f"CVSS score must be within [0, 10], got {score}")
    if score == 0.0:
        return "none"
    if score < 4.0:
        return "low"
    if score < 7.0:
        return "medium"
    if score < 9.0:
        return "high"
    return "critical"


def minimum_delay(api_key: str | None) -> float:
    return KEYED_MIN_DELAY if api_key else ANONYMOUS_MIN_DELAY


def resolve_request_delay(requested: float | None, api_key: str | None, override: bool = False) -> float:
    """Pick the request spacing, refusing to go below the API floor unless overridden."""
    floor = minimum_delay(api_key)
    if requested is None:
        return floor
    if requested < 0:
        raise ConfigError("NVD request delay must not be negative")
    if requested < floor and not override:
        raise ConfigError(
            f"NVD request delay {requested:.3f}s is below the API minimum of {floor}s; "
            "set nvd_delay_override to allow it"
        )
    return requested


@dataclass(frozen=True)
class EnrichmentPolicy:
    request_delay: float = ANONYMOUS_MIN_DELAY
    max_retries: int = 3
    cache_dir: Path = field(default_factory=lambda: Path.home() / ".cache" / "reconchain" / "nvd")
    offline_only: bool = False
    # read-only caches consulted after cache_dir (e.g. bundled fixtures)
    seed_dirs: tuple[Path, ...] = ()

    def __post_init__(self):
        if self.request_delay < 0:
            raise ValueError("request_delay must be >= 0")
        if not 0 <= self.max_retries <= 10:
            raise ValueError("max_retries must be a small non-negative integer")
        object.__setattr__(self, "cache_dir", Path(self.cache_dir))
        object.__setattr__(self, "seed_dirs", tuple(Path(p) for p in self.seed_dirs))


class RateGate:
    """Spaces successive calls at least ``delay`` seconds apart, across threads."""

    def __init__(self, delay: float, clock=time.monotonic, sleep=time.sleep):
        self.delay = delay
        self._clock = clock
        self._sleep = sleep
        self._lock = threading.Lock()
        self._last: float | None = None

    def wait(self) -> None:
        with self._lock:
            if self._last is not None:
                remaining = self._last + self.delay - self._clock()
                if remaining > 0:
                    self._sleep(remaining)
            self._last = self._clock()


Transport = Callable[[str, dict, dict, float], "tuple[int, str]"]


def requests_transport(url: str, params: dict, headers: dict, timeout: float) -> tuple[int, str]:
    import requests

    resp = requests.get(url, params=params, headers=headers, timeout=timeout)
    return resp.status_code, resp.text


class TransientError(Exception):
    pass


class CveCache:
    """One JSON document per CVE: the raw API body plus fetch metadata."""

    def __init__(self, cache_dir: Path, seed_dirs: Iterable[Path] = ()):
        self.cache_dir = cache_dir
        self.seed_dirs = tuple(seed_dirs)

    def path(self, cve_id: str) -> Path:
        return self.cache_dir / f"{cve_id}.json"

    def ensure_writable(self) -> None:
        try:
            self.cache_dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ConfigError(f"cannot create NVD cache directory {self.cache_dir}: {exc}") from None
        if not os.access(self.cache_dir, os.W_OK):
            raise ConfigError(f"NVD cache directory {self.cache_dir} is not writable")

    def load(self, cve_id: str) -> str | None:
        for directory in (self.cache_dir, *self.seed_dirs):
            path = directory / f"{cve_id}.json"
            try:
                envelope = json.loads(path.read_text(encoding="utf-8"))
                return envelope["response"]
            except FileNotFoundError:
                continue
            except (OSError, ValueError, KeyError, TypeError):
                logger.warning("ignoring unreadable cache entry %s", path)
        return None

    def store(self, cve_id: str, body: str) -> None:
        envelope = {
            "api_version": API_VERSION,
            "fetched_at": format_timestamp(datetime.now(timezone.utc)),
            "response": body,
        }
        path = self.path(cve_id)
        tmp = path.with_name(f".{path.name}.{threading.get_ident()}.tmp")
        tmp.write_text(json.dumps(envelope, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        os.replace(tmp, path)


def record_from_response(cve_id: str, body: str, source: str) -> CveRecord | None:
    """Build a record from an NVD API body; None when the API has no such CVE."""
    data = json.loads(body)
    vulns = data.get("vulnerabilities") or []
    match = next((v["cve"] for v in vulns if v.get("cve", {}).get("id", "").upper() == cve_id), None)
    if match is None:
        return None
    description = next(
        (d["value"] for d in match.get("descriptions", []) if d.get("lang") == "en"),
        "",
    )
    score, vector = _preferred_cvss(match.get("metrics", {}))
    return CveRecord(
        id=cve_id,
        description=description.strip(),
        cvss_score=score,
        cvss_vector=vector,
        severity=severity_from_score(score),
        source=source,
    )


def _preferred_cvss(metrics: dict) -> tuple[float | None, str | None]:
    for key in _METRIC_KEYS:
        entries = metrics.get(key) or []
        if not entries:
            continue
        entry = next((e for e in entries if e.get("type") == "Primary"), entries[0])
        cvss = entry.get("cvssData", {})
        if "baseScore" in cvss:
            return float(cvss["baseScore"]), cvss.get("vectorString")
    return None, None


class NvdClient:
    """Fetches CVE records, consulting the cache first.

    Safe to share between threads; network requests pass through a single
    RateGate so the request rate never exceeds ``1 / request_delay``.
    """

    def __init__(
        self,
        policy: EnrichmentPolicy,
        api_key: str | None = None,
        transport: Transport | None = None,
        base_url: str = NVD_URL,
        timeout: float = 30.0,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.policy = policy
        self.api_key = api_key
        self.transport = transport or requests_transport
        self.base_url = base_url
        self.timeout = timeout
        self._sleep = sleep
        self.cache = CveCache(policy.cache_dir, policy.seed_dirs)
        self.gate = RateGate(policy.request_delay, sleep=sleep)
        self._lock = threading.Lock()
        self.requests_made = 0
        if not policy.offline_only:
            self.cache.ensure_writable()

    def fetch(self, cve_id: str) -> CveRecord:
        cve_id = normalize_cve(cve_id)
        cached = self.cache.load(cve_id)
        if cached is not None:
            try:
                record = record_from_response(cve_id, cached, "cache")
            except (ValueError, KeyError, TypeError):
                record = None
            if record is not None:
                return record
        if self.policy.offline_only:
            return CveRecord.unresolved(cve_id)

        body = self._request_with_retries(cve_id)
        if body is None:
            return CveRecord.unresolved(cve_id)
        try:
            record = record_from_response(cve_id, body, "nvd")
        except (ValueError, KeyError, TypeError) as exc:
            logger.warning("unparsable NVD response for %s: %s", cve_id, exc)
            return CveRecord.unresolved(cve_id)
        if record is None:
            return CveRecord.unresolved(cve_id)
        self.cache.store(cve_id, body)
        return record

    def _request_with_retries(self, cve_id: str) -> str | None:
        headers = {"apiKey": self.api_key} if self.api_key else {}
        for attempt in range(self.policy.max_retries + 1):
            if attempt:
                self._sleep(self.policy.request_delay * 2 ** (attempt - 1))
            self.gate.wait()
            with self._lock:
                self.requests_made += 1
            try:
                status, body = self.transport(self.base_url, {"cveId": cve_id}, headers, self.timeout)
            except Exception as exc:  # transport failures are retried like 5xx
                logger.warning("NVD request for %s failed: %s", cve_id, exc)
                continue
            if status == 200:
                return body
            if status == 404:
                return None
            logger.warning("NVD returned HTTP %s for %s (attempt %d)", status, cve_id, attempt + 1)
        logger.warning("giving up on %s after %d attempts", cve_id, self.policy.max_retries + 1)
        return None


def fetch_cve(cve_id: str, policy: EnrichmentPolicy, client: NvdClient | None = None) -> CveRecord:
    cve_id = normalize_cve(cve_id)
    client = client or NvdClient(policy)
    return client.fetch(cve_id)


def enrich(
    hosts: list[HostRecon], policy: EnrichmentPolicy, client: NvdClient | None = None
) -> AssessmentContext:
    client = client or NvdClient(policy)
    ctx = AssessmentContext(hosts=list(hosts))
    for cve_id in ctx.cve_ids():
        ctx.vulnerabilities[cve_id] = client.fetch(cve_id)
    unresolved = [c for c, r in ctx.vulnerabilities.items() if r.source == "unresolved"]
    if unresolved:
        logger.warning("%d CVE(s) could not be resolved: %s", len(unresolved), ", ".join(unresolved))
    ctx.stage_status["scan"] = "done"
    ctx.stage_status["enrich"] = "degraded" if unresolved else "done"
    return ctx
