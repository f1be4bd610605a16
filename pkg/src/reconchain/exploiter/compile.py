"""Recover compiler invocations documented in C/C++ exploit comments."""

from __future__ import annotations

import logging
import re
import shlex
import subprocess
from pathlib import Path
from typing import Callable, Iterator

from ..models import CompileSpec

logger = logging.getLogger(__name__)

_COMPILER = re.compile(
    r"(?:(?<=^)|(?<=[\s:;`'\"$>(]))"
    r"(?P<cc>(?:[\w.]+-)*(?:gcc|g\+\+|clang\+\+|clang|cc|c\+\+|tcc|icc)(?:-\d+(?:\.\d+)*)?)"
    r"(?=\s)(?P<rest>.*)$"
)
_SOURCE_FILE = re.compile(r"^[^\s]*\.(?:c|cc|cpp|cxx)$")
_QUOTES = "`'\""


def comment_lines(text: str) -> Iterator[str]:
    """Yield the text of each comment line, skipping string and char literals."""
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch in "\"'":
            i += 1
            while i < n and text[i] != ch and text[i] != "\n":
                i += 2 if text[i] == "\\" else 1
            i += 1
        elif text.startswith("//", i):
            end = text.find("\n", i)
            end = n if end == -1 else end
            yield text[i + 2 : end].strip()
            i = end
        elif text.startswith("/*", i):
            end = text.find("*/", i + 2)
            end = n if end == -1 else end
            for line in text[i + 2 : end].splitlines():
                yield line.strip().lstrip("*").strip()
            i = end + 2
        else:
            i += 1


def extract_compile_spec(source: bytes, local_name: str | None = None) -> CompileSpec | None:
    """First compiler command found in a comment, or None.

    The first source-file argument is replaced by ``local_name`` (the stored
    file name) when given; the name is appended if no source file is named.
    """
    text = source.decode("utf-8", errors="replace")
    for line in comment_lines(text):
        match = _COMPILER.search(line)
        if match is None:
            continue
        rest = match.group("rest")
        start = match.start("cc")
        if start > 0 and line[start - 1] in _QUOTES:
            closing = rest.find(line[start - 1])
            if closing != -1:
                rest = rest[:closing]
        tokens = rest.split()
        if not any(t.startswith("-") or _SOURCE_FILE.match(t) for t in tokens):
            continue
        if local_name is not None:
            for k, token in enumerate(tokens):
                if _SOURCE_FILE.match(token):
                    tokens[k] = local_name
                    break
            else:
                tokens.append(local_name)
        return CompileSpec(
            command_line=" ".join([match.group("cc"), *tokens]),
            source_of_truth=line,
        )
    return None


def run_compile(spec: CompileSpec, workdir: Path, runner: Callable[..., subprocess.CompletedProcess] = subprocess.run) -> subprocess.CompletedProcess:
    """Run a recovered compile command in ``workdir`` (never through a shell)."""
    argv = shlex.split(spec.command_line)
    logger.info("compiling in %s: %s", workdir, spec.command_line)
    return runner(argv, cwd=workdir, capture_output=True, text=True)
