"""
Sweep command.

Varies one scenario quantity over an evenly spaced range and writes one
summary row per value.
"""
import argparse
from typing import Any, Optional

from impact.commands.base import emit, output_dir, output_format
from impact.core.error_utils import handle_command_errors
from impact.core.errors import EXIT_NUMERICAL, EXIT_OK, ScenarioError
from impact.core.logging import get_logger
from impact.schemas.reports import SweepReport
from impact.schemas.scenario import OutputFormat, SweepMode, SweepSection
from impact.services.reporting import csv_text, to_json, write_sweep_csv, write_text
from impact.services.scenario import load_scenario
from impact.services.sweep import sweep, sweep_values

logger = get_logger(__name__)


def _pick(cli_value: Any, section: Optional[SweepSection], field: str) -> Any:
    if cli_value is not None:
        return cli_value
    return getattr(section, field) if section is not None else None


@handle_command_errors
def cmd_sweep(args: argparse.Namespace) -> int:
    """Run the sweep subcommand."""
    scenario = load_scenario(args.scenario)
    section = scenario.sweep

    parameter = _pick(args.param, section, "parameter")
    start = _pick(args.start, section, "start")
    stop = _pick(args.stop, section, "stop")
    count = _pick(args.count, section, "count")
    missing = [
        flag
        for flag, value in (("--param", parameter), ("--from", start), ("--to", stop), ("--count", count))
        if value is None
    ]
    if missing:
        raise ScenarioError(f"Sweep needs {', '.join(missing)}", path=args.scenario)
    if int(count) < 0:
        raise ScenarioError("--count must not be negative", path=args.scenario)

    mode = SweepMode(args.mode) if args.mode else (section.mode if section else SweepMode.RESOLVE)
    place = section.place_on_surface if section else True
    values = sweep_values(float(start), float(stop), int(count))

    rows = sweep(scenario, str(parameter), values, mode=mode, place=place)
    n = len(scenario.model.coordinates)

    if output_format(args, scenario) is OutputFormat.JSON:
        text = to_json(
            SweepReport(parameter=str(parameter), mode=mode.value, coordinates=scenario.model.coordinates, rows=rows)
        )
        name = "sweep.json"
    else:
        text = csv_text(write_sweep_csv, rows, n, mode is SweepMode.SIMULATE)
        name = "sweep.csv"

    directory = output_dir(args, scenario)
    if directory is None:
        emit(text)
    else:
        target = write_text(directory / name, text)
        logger.info_with_props("Sweep written", {"path": str(target), "rows": len(rows)})

    failed = [row.value for row in rows if row.error]
    if failed:
        logger.warning_with_props("Sweep values failed", {"count": len(failed), "values": failed[:10]})
        return EXIT_NUMERICAL
    return EXIT_OK
