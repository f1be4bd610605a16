from .cli import main, parse_cli
from .config import RunConfig, Settings
from .persistence import load_narration, load_stage, save_narration, save_stage
from .pipeline import TIMING_LABELS, Backends, RunSummary, StageTiming, build_backends, run_pipeline

__all__ = [
    "TIMING_LABELS",
    "Backends",
    "RunConfig",
    "RunSummary",
    "Settings",
    "StageTiming",
    "build_backends",
    "load_narration",
    "load_stage",
    "main",
    "parse_cli",
    "run_pipeline",
    "save_narration",
    "save_stage",
]
