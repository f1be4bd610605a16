"""Staged infrastructure pentest pipeline: scan, enrich, exploit lookup, narrate, report."""

__version__ = "0.1.0"
