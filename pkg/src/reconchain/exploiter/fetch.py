"""Download exploit sources into the project directory."""

from __future__ import annotations

import logging
import os
from pathlib import Path, PurePosixPath
from typing import Callable, Protocol

from ..errors import FetchFailed
from ..models import ExploitRef, IndexEntry
from .compile import extract_compile_spec
from .language import detect_language

logger = logging.getLogger(__name__)

DEFAULT_MIRROR_URL = "https://gitlab.com/exploit-database/exploitdb/-/raw/main/"


class ExploitFetcher(Protocol):
    def fetch(self, file_path: str) -> bytes: ...


class LocalMirrorFetcher:
    """Reads exploit bodies from a directory laid out like the ExploitDB repository."""

    def __init__(self, root: str | Path):
        self.root = Path(root).resolve()
        self.calls = 0

    def fetch(self, file_path: str) -> bytes:
        self.calls += 1
        path = (self.root / file_path).resolve()
        if self.root not in path.parents:
            raise FetchFailed(f"{file_path} escapes the mirror root")
        try:
            return path.read_bytes()
        except OSError as exc:
            raise FetchFailed(f"mirror has no copy of {file_path}: {exc.strerror}") from None


class RemoteFetcher:
    """HTTPS GET of raw exploit files below ``base_url``."""

    def __init__(self, base_url: str = DEFAULT_MIRROR_URL, timeout: float = 30.0, get: Callable | None = None):
        self.base_url = base_url.rstrip("/") + "/"
        self.timeout = timeout
        self._get = get
        self.calls = 0

    def fetch(self, file_path: str) -> bytes:
        self.calls += 1
        url = self.base_url + file_path.lstrip("/")
        get = self._get
        if get is None:
            import requests

            get = requests.get
        try:
            resp = get(url, timeout=self.timeout)
        except Exception as exc:
            raise FetchFailed(f"GET {url} failed: {exc}") from None
        if resp.status_code != 200:
            raise FetchFailed(f"GET {url} returned HTTP {resp.status_code}")
        return resp.content


def make_fetcher(location: str) -> ExploitFetcher:
    if location.startswith(("http://", "https://")):
        return RemoteFetcher(location)
    if location.startswith("file://"):
        location = location[len("file://") :]
    return LocalMirrorFetcher(location)


def local_name(entry: IndexEntry) -> str:
    return f"{entry.exploit_id}_{PurePosixPath(entry.file_path).name}"


def fetch_exploit(entry: IndexEntry, project_dir: str | Path, fetcher: ExploitFetcher) -> ExploitRef:
    """Store the exploit under ``<project>/exploits/`` and classify it.

    Failures are reported on the returned ref (``local_path`` is None)
    instead of being raised.
    """
    name = local_name(entry)
    suffix = PurePosixPath(entry.file_path).suffix
    try:
        body = fetcher.fetch(entry.file_path)
    except FetchFailed as exc:
        logger.warning("could not fetch exploit %d: %s", entry.exploit_id, exc)
        return ExploitRef(entry=entry, language=detect_language(b"", suffix), fetch_error=str(exc))

    dest_dir = Path(project_dir) / "exploits"
    dest_dir.mkdir(parents=True, exist_ok=True)
    dest = dest_dir / name
    tmp = dest.with_name(f".{name}.tmp")
    tmp.write_bytes(body)
    os.replace(tmp, dest)

    language = detect_language(body, suffix)
    spec = extract_compile_spec(body, local_name=name) if language in ("c", "cpp") else None
    return ExploitRef(
        entry=entry,
        local_path=f"exploits/{name}",
        language=language,
        compile_spec=spec,
    )
