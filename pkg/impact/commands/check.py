"""
Check command.

Runs the scenario diagnostics and exits with 0 only when every check passes.
"""
import argparse

from impact.commands.base import emit, output_format
from impact.core.error_utils import handle_command_errors
from impact.core.errors import EXIT_NUMERICAL, EXIT_OK
from impact.schemas.reports import DiagnosticsReport
from impact.schemas.scenario import OutputFormat
from impact.services.diagnostics import run_diagnostics
from impact.services.reporting import render_table, to_json
from impact.services.scenario import load_scenario


def diagnostics_table(report: DiagnosticsReport) -> str:
    rows = [["check", "result", "value", "detail"]]
    for check in report.checks:
        rows.append(
            [
                check.name,
                "pass" if check.passed else "FAIL",
                "" if check.value is None else format(check.value, ".3e"),
                check.detail,
            ]
        )
    return render_table(rows)


@handle_command_errors
def cmd_check(args: argparse.Namespace) -> int:
    """Run the check subcommand."""
    scenario = load_scenario(args.scenario)
    report = run_diagnostics(scenario, name=str(args.scenario))
    emit(to_json(report) if output_format(args, scenario) is OutputFormat.JSON else diagnostics_table(report))
    return EXIT_OK if report.passed else EXIT_NUMERICAL
