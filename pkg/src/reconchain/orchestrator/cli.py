"""Command-line entry point.

    reconchain --ip 10.0.0.5 --ports 1-1000 --project demo [--offline] ...
    reconchain compile --project demo --exploit 42031
    reconchain summary --project demo
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from ..errors import FatalStageError, InvalidTarget, ReconChainError, UsageError
from ..exploiter import console_summary, run_compile
from ..models import STAGES, TargetSpec
from .config import EXPLOITER_KINDS, NLP_KINDS, REPORTER_KINDS, SCANNER_KINDS, RunConfig, Settings
from .persistence import ARTIFACTS, load_stage
from .pipeline import run_pipeline

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_FATAL = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _run_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="reconchain", description="Automated infrastructure pentest pipeline.", allow_abbrev=False)
    p.add_argument("--ip", required=True, help="target IPv4 address(es) or CIDR ranges, comma separated")
    p.add_argument("--ports", required=True, help="ports and ranges to scan, e.g. 22,80,1000-2000")
    p.add_argument("--project", required=True, help="project folder that receives all results")
    p.add_argument("--scanner", choices=SCANNER_KINDS, default="nmap")
    p.add_argument("--exploiter", choices=EXPLOITER_KINDS, default="exploitdb")
    p.add_argument("--nlpagent", choices=NLP_KINDS, default="remote")
    p.add_argument("--reporter", choices=REPORTER_KINDS, default="markdown")
    p.add_argument("--config", type=Path, help="key = value settings file")
    p.add_argument("--resume-from", choices=STAGES, help="reuse artifacts of earlier stages")
    p.add_argument("--offline", action="store_true", help="fixture scanner, NVD cache only, local exploit mirror, stub NLP")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def parse_cli(args: list[str]) -> RunConfig:
    ns = _run_parser().parse_args(args)
    try:
        targets = TargetSpec.parse(ns.ip, ns.ports)
    except InvalidTarget as exc:
        raise UsageError(f"argument --ip/--ports: {exc}") from None
    try:
        return RunConfig(
            targets=targets,
            project_name=ns.project,
            scanner_kind=ns.scanner,
            exploiter_kind=ns.exploiter,
            nlp_kind=ns.nlpagent,
            reporter_kind=ns.reporter,
            config_path=ns.config,
            resume_from=ns.resume_from,
            offline=ns.offline,
        )
    except ValueError as exc:
        raise UsageError(f"argument --project: {exc}") from None


def _project_parser(prog: str) -> argparse.ArgumentParser:
    p = _Parser(prog=f"reconchain {prog}", allow_abbrev=False)
    p.add_argument("--project", required=True)
    p.add_argument("--config", type=Path)
    return p


def _project_dir(ns: argparse.Namespace) -> Path:
    settings = Settings.load(ns.config)
    return Path(settings.get("projects_dir") or os.getcwd()) / ns.project


def _latest_context(project_dir: Path):
    for stage in ("narrate", "exploit"):
        if (project_dir / ARTIFACTS[stage]).exists():
            return load_stage(project_dir, stage)
    raise UsageError(f"{project_dir} has no exploit-stage results yet")


def _compile_cmd(args: list[str]) -> int:
    p = _project_parser("compile")
    p.add_argument("--exploit", type=int, required=True, help="ExploitDB id of a downloaded C/C++ exploit")
    ns = p.parse_args(args)
    project_dir = _project_dir(ns)
    ctx = _latest_context(project_dir)
    ref = next(
        (r for refs in ctx.exploits.values() for r in refs if r.entry.exploit_id == ns.exploit), None
    )
    if ref is None or ref.local_path is None:
        raise UsageError(f"exploit {ns.exploit} was not downloaded into {project_dir}")
    if ref.compile_spec is None:
        raise UsageError(f"exploit {ns.exploit} ({ref.language}) documents no compile command")
    print(f"$ {ref.compile_spec.command_line}")
    proc = run_compile(ref.compile_spec, project_dir / "exploits")
    sys.stdout.write(proc.stdout)
    sys.stderr.write(proc.stderr)
    print(f"compiler exited with status {proc.returncode}")
    return EXIT_OK if proc.returncode == 0 else EXIT_FATAL


def _summary_cmd(args: list[str]) -> int:
    ns = _project_parser("summary").parse_args(args)
    project_dir = _project_dir(ns)
    sys.stdout.write(console_summary(_latest_context(project_dir), base_dir=project_dir))
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        if argv and argv[0] == "compile":
            return _compile_cmd(argv[1:])
        if argv and argv[0] == "summary":
            return _summary_cmd(argv[1:])
        config = parse_cli(argv)
        logging.basicConfig(
            level=logging.INFO if "-v" in argv or "--verbose" in argv else logging.WARNING,
            format="%(levelname)s %(name)s: %(message)s",
        )
        run_pipeline(config)
        return EXIT_OK
    except UsageError as exc:
        print(f"reconchain: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FatalStageError as exc:
        print(f"reconchain: fatal: {exc}", file=sys.stderr)
        return EXIT_FATAL
    except ReconChainError as exc:
        print(f"reconchain: fatal: {exc}", file=sys.stderr)
        return EXIT_FATAL


if __name__ == "__main__":
    sys.exit(main())
