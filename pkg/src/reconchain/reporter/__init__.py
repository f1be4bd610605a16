from .model import ExploitRow, FindingEntry, OverviewRow, ReportModel, build_report_model
from .render import default_template, load_template, render_report

__all__ = [
    "ExploitRow",
    "FindingEntry",
    "OverviewRow",
    "ReportModel",
    "build_report_model",
    "default_template",
    "load_template",
    "render_report",
]
