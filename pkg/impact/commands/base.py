"""
Shared helpers for command modules.
"""
import argparse
import sys
from pathlib import Path
from typing import Optional

from impact.schemas.scenario import OutputFormat, ScenarioFile


def output_format(args: argparse.Namespace, scenario: Optional[ScenarioFile] = None) -> OutputFormat:
    """Format from the command line, else from the scenario, else CSV."""
    if getattr(args, "format", None):
        return OutputFormat(args.format)
    if scenario is not None:
        return scenario.output.format
    return OutputFormat.CSV


def output_dir(args: argparse.Namespace, scenario: ScenarioFile) -> Optional[Path]:
    """Directory from --out, else the scenario's output path."""
    out = getattr(args, "out", None) or scenario.output.path
    return Path(out) if out else None


def emit(text: str) -> None:
    """Write report text to stdout."""
    sys.stdout.write(text)
    sys.stdout.flush()
