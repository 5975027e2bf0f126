"""
Tests for the error hierarchy and command error handling.
"""
from impact.core.error_utils import error_context, handle_command_errors
from impact.core.errors import (
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_USAGE,
    ContactError,
    DegenerateConstraintError,
    EvaluationError,
    ExpressionSyntaxError,
    GrazingImpactError,
    ImpactError,
    MetricError,
    RankError,
    ScenarioError,
    SimulationError,
    UnknownParameterError,
)


def test_exit_codes_by_family():
    """Test that usage problems exit 1 and numerical failures exit 2."""
    assert ScenarioError().exit_code == EXIT_USAGE
    assert UnknownParameterError(parameter="zeta").exit_code == EXIT_USAGE
    assert ExpressionSyntaxError(column=3).exit_code == EXIT_USAGE
    assert EvaluationError().exit_code == EXIT_NUMERICAL
    assert MetricError().exit_code == EXIT_NUMERICAL
    assert GrazingImpactError().exit_code == EXIT_NUMERICAL


def test_subclass_relationships():
    """Test the error taxonomy."""
    assert issubclass(DegenerateConstraintError, RankError)
    assert issubclass(GrazingImpactError, ContactError)
    assert issubclass(ScenarioError, ImpactError)


def test_error_data():
    """Test that structured context is kept."""
    error = MetricError(min_eigenvalue=-2.0)
    assert error.data["min_eigenvalue"] == -2.0
    assert error.to_dict()["code"] == "metric_error"

    syntax = ExpressionSyntaxError("Unexpected end of expression", column=4, text="y -")
    assert syntax.column == 4
    assert "column 4" in syntax.detail
    assert UnknownParameterError(parameter="zeta").detail.endswith("zeta")


def test_simulation_error_wraps_cause():
    """Test that a simulation error carries the cause and its exit code."""
    cause = ScenarioError("bad")
    error = SimulationError(time=0.25, event_index=3, cause=cause)

    assert error.exit_code == EXIT_USAGE
    assert error.data["time"] == 0.25
    assert error.data["event_index"] == 3
    assert error.data["cause"]["code"] == "scenario_error"
    assert error.detail.endswith("bad")


def test_error_context():
    """Test the logging context of an engine error."""
    context = error_context(RankError(data={"rows": 2}), command="cmd_resolve")

    assert context["error_type"] == "RankError"
    assert context["error_code"] == "rank_error"
    assert context["error_data"] == {"rows": 2}
    assert context["command"] == "cmd_resolve"


def test_handle_command_errors_maps_exit_codes():
    """Test the command decorator."""

    @handle_command_errors
    def ok(_args):
        return EXIT_OK

    @handle_command_errors
    def usage(_args):
        raise ScenarioError("missing field")

    @handle_command_errors
    def unexpected(_args):
        raise RuntimeError("boom")

    assert ok(None) == EXIT_OK
    assert usage(None) == EXIT_USAGE
    assert unexpected(None) == EXIT_NUMERICAL
