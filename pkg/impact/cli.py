"""
Command-line interface.

Usage::

    impact resolve  --scenario PATH [--out DIR] [--format csv|json]
    impact simulate --scenario PATH [--out DIR] [--format csv|json]
    impact sweep    --scenario PATH --param NAME --from R --to R --count N
                    [--mode resolve|simulate] [--out DIR] [--format csv|json]
    impact check    --scenario PATH [--format csv|json]

Exit codes: 0 success, 1 usage or scenario errors, 2 numerical or domain
failures.
"""
import argparse
import sys
from typing import List, NoReturn, Optional

from pydantic import ValidationError

from impact import __version__
from impact.commands.check import cmd_check
from impact.commands.resolve import cmd_resolve
from impact.commands.simulate import cmd_simulate
from impact.commands.sweep import cmd_sweep
from impact.core.config import settings
from impact.core.errors import EXIT_USAGE
from impact.core.logging import get_logger, setup_logging
from impact.core.telemetry import setup_telemetry
from impact.core.tolerances import configure_tolerances

logger = get_logger(__name__)


class ImpactArgumentParser(argparse.ArgumentParser):
    """Argument parser reporting usage errors with exit code 1."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_common(parser: argparse.ArgumentParser, out: bool = True) -> None:
    parser.add_argument("--scenario", required=True, help="Scenario JSON file")
    if out:
        parser.add_argument("--out", help="Output directory")
    parser.add_argument("--format", choices=["csv", "json"], help="Report format")


def build_parser() -> argparse.ArgumentParser:
    """Create the argument parser with its subcommands."""
    parser = ImpactArgumentParser(
        prog="impact",
        description="Impacts of mechanical systems with a rough unilateral constraint.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", help=f"Log level (default {settings.LOG_LEVEL})")
    parser.add_argument("--log-format", choices=["text", "json"], help="Log output format")

    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=ImpactArgumentParser)

    resolve = subparsers.add_parser("resolve", help="Resolve the single impact of a scenario")
    _add_common(resolve)
    resolve.set_defaults(handler=cmd_resolve)

    simulate = subparsers.add_parser("simulate", help="Run an event-driven simulation")
    _add_common(simulate)
    simulate.set_defaults(handler=cmd_simulate)

    sweep = subparsers.add_parser("sweep", help="Sweep one parameter over a range")
    _add_common(sweep)
    sweep.add_argument("--param", help="Parameter name (m, e_S, mu_s, q.theta, ...)")
    sweep.add_argument("--from", dest="start", type=float, help="First value")
    sweep.add_argument("--to", dest="stop", type=float, help="Last value")
    sweep.add_argument("--count", type=int, help="Number of values")
    sweep.add_argument("--mode", choices=["resolve", "simulate"], help="Evaluate each value by a single impact or a run")
    sweep.set_defaults(handler=cmd_sweep)

    check = subparsers.add_parser("check", help="Run model diagnostics")
    _add_common(check, out=False)
    check.set_defaults(handler=cmd_check)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments and run a subcommand.

    Args:
        argv: Arguments without the program name, defaults to sys.argv[1:]

    Returns:
        int: Process exit code
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    setup_logging(level=args.log_level, fmt=args.log_format)
    setup_telemetry()
    try:
        configure_tolerances()
    except ValidationError as e:
        logger.error_with_props("Invalid IMPACT_TOL_* environment", {"errors": e.errors(include_url=False)})
        return EXIT_USAGE

    logger.debug_with_props("Command started", {"command": args.command, "scenario": args.scenario})
    return int(args.handler(args))


def run() -> None:
    """Console script entry point."""
    sys.exit(main())


if __name__ == "__main__":
    run()
