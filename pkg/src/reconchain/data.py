"""Locations of the bundled offline fixtures."""

from importlib import resources
from pathlib import Path


def data_path(*parts: str) -> Path:
    return Path(str(resources.files("reconchain").joinpath("data", *parts)))


THREE_HOST_SCAN = ("scans", "three_hosts.xml")
ELASTICSEARCH_SCAN = ("scans", "elasticsearch.xml")
SMB_SCAN = ("scans", "smb_blue.xml")
NVD_CACHE = ("nvd_cache",)
EXPLOIT_INDEX = ("exploitdb", "files_exploits.csv")
EXPLOIT_MIRROR = ("exploitdb", "mirror")
