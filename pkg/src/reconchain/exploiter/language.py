"""Regex-based language tagging for downloaded exploit sources.

Rules are tried in a fixed order and the first hit wins:
framework signature, shebang, file extension, content heuristics.
"""

from __future__ import annotations

import re

_METASPLOIT = [
    re.compile(r"""require\s*\(?\s*['"]msf/core['"]"""),
    re.compile(r"^\s*class\s+Metasploit\w*\s*<\s*Msf::", re.MULTILINE),
]

_SHEBANG = [
    (re.compile(r"\bpython[\d.]*\b"), "python"),
    (re.compile(r"\bruby[\d.]*\b"), "ruby"),
    (re.compile(r"\bperl[\d.]*\b"), "perl"),
    (re.compile(r"\bphp[\d.]*\b"), "php"),
    (re.compile(r"(?:^|[/\s])(?:ba|da|z|k)?sh\b"), "shell"),
]

EXTENSIONS = {
    ".py": "python",
    ".rb": "ruby",
    ".c": "c",
    ".h": "c",
    ".cpp": "cpp",
    ".cc": "cpp",
    ".cxx": "cpp",
    ".hpp": "cpp",
    ".java": "java",
    ".sh": "shell",
    ".bash": "shell",
    ".pl": "perl",
    ".pm": "perl",
    ".php": "php",
    ".txt": "text",
    ".md": "text",
}

_CPP_HINTS = re.compile(r"#include\s*<(?:iostream|string|vector|map|memory|thread)>|\bstd::|using\s+namespace\s+std\b")


def detect_language(source: bytes, file_extension: str) -> str:
    text = source.decode("utf-8", errors="replace")

    if any(p.search(text) for p in _METASPLOIT):
        return "metasploit"

    first_line = text.split("\n", 1)[0]
    if first_line.startswith("#!"):
        for pattern, tag in _SHEBANG:
            if pattern.search(first_line):
                return tag

    ext = file_extension.lower()
    if ext and not ext.startswith("."):
        ext = "." + ext
    if ext in EXTENSIONS:
        return EXTENSIONS[ext]

    if "#include <" in text:
        return "cpp" if _CPP_HINTS.search(text) else "c"
    if "public static void main" in text:
        return "java"
    if "<?php" in text:
        return "php"
    return "unknown"
