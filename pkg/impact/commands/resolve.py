"""
Resolve command.

Resolves the single impact described by a scenario's initial state and
prints the split, branch, impulse, right velocity and energy change. With an
output directory both the JSON report and the text table are stored.
"""
import argparse

from impact.commands.base import emit, output_dir, output_format
from impact.core.error_utils import handle_command_errors
from impact.core.errors import EXIT_OK
from impact.core.laws import stick_residual
from impact.core.logging import get_logger
from impact.schemas.reports import ResolveReport
from impact.schemas.scenario import OutputFormat, ScenarioFile
from impact.services.reporting import resolve_report, resolve_table, to_json, write_text
from impact.services.scenario import build_model, build_state, load_scenario

logger = get_logger(__name__)


def resolve_scenario(scenario: ScenarioFile) -> ResolveReport:
    """
    Resolve the impact of a scenario.

    Args:
        scenario: Validated scenario

    Returns:
        ResolveReport: The single-impact report
    """
    model = build_model(scenario.model)
    state = build_state(scenario, model)
    outcome = model.resolve(state, scenario.law)
    residual = stick_residual(model.stick.at(state.q), outcome.right_velocity)
    return resolve_report(model.name, model.coordinates, state.time, outcome, residual)


@handle_command_errors
def cmd_resolve(args: argparse.Namespace) -> int:
    """Run the resolve subcommand."""
    scenario = load_scenario(args.scenario)
    report = resolve_scenario(scenario)
    fmt = output_format(args, scenario)

    emit(to_json(report) if fmt is OutputFormat.JSON else resolve_table(report))

    directory = output_dir(args, scenario)
    if directory is not None:
        written = [
            write_text(directory / "resolve.json", to_json(report)),
            write_text(directory / "resolve.txt", resolve_table(report)),
        ]
        logger.info_with_props("Resolve report written", {"paths": [str(p) for p in written]})
    return EXIT_OK
