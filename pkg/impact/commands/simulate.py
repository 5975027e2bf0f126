"""
Simulate command.

Runs the event-driven simulation of a scenario and writes the samples and
events files.
"""
import argparse
from pathlib import Path

from impact.commands.base import emit, output_dir, output_format
from impact.core.error_utils import handle_command_errors
from impact.core.errors import EXIT_OK
from impact.core.logging import get_logger
from impact.schemas.scenario import OutputFormat
from impact.services.reporting import (
    csv_text,
    to_json,
    trajectory_report,
    write_events_csv,
    write_samples_csv,
    write_text,
)
from impact.services.scenario import build_config, load_scenario
from impact.services.simulator import run_simulation

logger = get_logger(__name__)


@handle_command_errors
def cmd_simulate(args: argparse.Namespace) -> int:
    """Run the simulate subcommand."""
    scenario = load_scenario(args.scenario)
    config = build_config(scenario, args.scenario)
    trajectory = run_simulation(config)

    n = config.model.dim
    directory = output_dir(args, scenario) or Path(".")
    if output_format(args, scenario) is OutputFormat.JSON:
        report = trajectory_report(config.model.name, config.law.variant, config.model.coordinates, trajectory)
        written = [write_text(directory / "trajectory.json", to_json(report))]
    else:
        written = [
            write_text(directory / "samples.csv", csv_text(write_samples_csv, trajectory, n)),
            write_text(directory / "events.csv", csv_text(write_events_csv, trajectory, n)),
        ]

    logger.info_with_props("Trajectory written", {"paths": [str(p) for p in written]})
    emit(
        f"status={trajectory.status.value} impacts={len(trajectory.impacts)} "
        f"samples={len(trajectory.samples)} t={trajectory.final_state.time!r}\n"
    )
    return EXIT_OK
