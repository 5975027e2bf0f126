"""
Tests for parameter sweeps.
"""
import json
import math

import numpy as np
import pytest

from impact.core.errors import UnknownParameterError
from impact.core.laws import Branch
from impact.models.library import rod_vertical_fall_branch
from impact.schemas.scenario import SweepMode
from impact.services.scenario import load_scenario, parse_scenario
from impact.services.sweep import (
    place_on_surface,
    resolve_parameter,
    sweep,
    sweep_async,
    sweep_values,
)
from tests.conftest import point_document, rod_document


@pytest.mark.asyncio
async def test_friction_sweep_flips_once(scenario_dir):
    """Test that raising mu_s turns the point impact from slip to stick exactly once."""
    scenario = load_scenario(scenario_dir / "point_slip.json")
    values = sweep_values(0.0, 2.0, 21)
    rows = await sweep_async(scenario, "mu_s", values, max_workers=3)

    assert [row.value for row in rows] == values
    assert all(row.error is None for row in rows)
    branches = [row.branch for row in rows]
    flips = [i for i in range(1, len(branches)) if branches[i] != branches[i - 1]]
    assert len(flips) == 1
    assert branches[0] == Branch.SLIP.value
    assert branches[-1] == Branch.STICK.value
    assert 0.9 <= rows[flips[0]].value <= 1.1

    # Slip right velocities lose tangential speed as mu_s grows
    tangential = [row.right_velocity[0] for row in rows[: flips[0]]]
    assert tangential == sorted(tangential, reverse=True)


@pytest.mark.asyncio
async def test_empty_sweep():
    """Test that no values give no rows."""
    scenario = parse_scenario(json.dumps(point_document()))
    assert await sweep_async(scenario, "mu_s", []) == []


def test_unknown_parameter():
    """Test that only scenario quantities can be swept."""
    scenario = parse_scenario(json.dumps(point_document()))

    with pytest.raises(UnknownParameterError) as exc_info:
        sweep(scenario, "R", [0.1])
    assert exc_info.value.data["parameter"] == "R"

    # The static law has no dynamic coefficient
    with pytest.raises(UnknownParameterError):
        resolve_parameter(scenario, "mu_d")


def test_resolve_parameter_kinds():
    """Test where model, law and coordinate names are found."""
    scenario = parse_scenario(json.dumps(rod_document()))

    assert resolve_parameter(scenario, "L").kind == "model"
    assert resolve_parameter(scenario, "g").kind == "model"
    assert resolve_parameter(scenario, "e_S").kind == "law"
    theta = resolve_parameter(scenario, "q.theta")
    assert (theta.kind, theta.key, theta.index) == ("q", "theta", 2)
    assert resolve_parameter(scenario, "theta").kind == "q"
    assert resolve_parameter(scenario, "qdot.y").index == 1


def test_angle_sweep_keeps_rod_on_line():
    """Test that sweeping the angle places the rod on the line before each impact."""
    scenario = parse_scenario(json.dumps(rod_document(law={"variant": "coulomb_static", "e_S": 0.5, "mu_s": 0.3})))
    values = [0.3, 0.8, 1.3, 1.5, 2.9]
    rows = sweep(scenario, "q.theta", values)

    for theta, row in zip(values, rows):
        assert row.error is None
        assert row.branch == rod_vertical_fall_branch(1.0, 1.0, 1.0 / 3.0, theta, 0.3).value
    assert {row.branch for row in rows} == {Branch.STICK.value, Branch.SLIP.value}


def test_place_on_surface_keeps_fixed_coordinates(rod):
    """Test Newton placement along the free coordinates only."""
    state = rod.state(0.0, (0.3, 0.2, 1.0), (0.0, -1.0, 0.0))
    placed = place_on_surface(rod, state, fixed=[2])

    assert placed.q[2] == 1.0
    assert placed.q[1] == pytest.approx(math.sin(1.0), abs=1e-12)
    np.testing.assert_array_equal(placed.qdot, state.qdot)


def test_failed_values_become_error_rows():
    """Test that engine errors are reported per row without stopping the sweep."""
    scenario = parse_scenario(json.dumps(point_document()))
    rows = sweep(scenario, "e_S", [0.5, 1.5, 0.0])

    assert [row.error is None for row in rows] == [True, False, True]
    assert rows[1].branch == "error"
    assert rows[1].error.startswith("scenario_error")
    assert rows[1].right_velocity == []
    np.testing.assert_allclose(rows[2].right_velocity, (0.5, 0.0), atol=1e-12)


def test_rows_follow_input_order():
    """Test ordering under concurrency with unsorted values."""
    scenario = parse_scenario(json.dumps(point_document()))
    values = [1.7, 0.2, 1.0, 0.0, 0.6]
    rows = sweep(scenario, "mu_s", values, max_workers=2)

    assert [row.value for row in rows] == values


def test_simulate_mode_rows():
    """Test full-run rows of a bounce height sweep."""
    document = point_document(
        model={"builtin": "point", "parameters": {"m": 1.0, "g": 10.0}},
        law={"variant": "coulomb_static", "e_S": 0.5, "mu_s": 0.0},
        initial={"t": 0.0, "q": [0.0, 1.0], "qdot": [0.0, 0.0]},
        simulation={"t_end": 3.0, "step": 1e-3},
    )
    scenario = parse_scenario(json.dumps(document))
    rows = sweep(scenario, "q.y", [0.5, 1.0], mode=SweepMode.SIMULATE)

    for row in rows:
        assert row.error is None
        assert row.status == "settled"
        assert row.impacts > 1
        assert row.branch == Branch.STICK.value
        assert row.delta_energy < 0.0


def test_simulate_mode_without_impacts():
    """Test the branch of a run that never reaches the surface."""
    document = point_document(
        model={"builtin": "point", "parameters": {"m": 1.0, "g": 0.0}},
        initial={"t": 0.0, "q": [0.0, 1.0], "qdot": [1.0, 0.0]},
        simulation={"t_end": 0.5, "step": 0.125},
    )
    rows = sweep(parse_scenario(json.dumps(document)), "qdot.x", [2.0], mode=SweepMode.SIMULATE)

    assert rows[0].branch == Branch.NONE.value
    assert rows[0].impacts == 0
    assert rows[0].status == "t_end"
    assert rows[0].right_velocity == [2.0, 0.0]


def test_sweep_values():
    """Test the evenly spaced inclusive range."""
    assert sweep_values(0.0, 1.0, 5) == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert sweep_values(2.0, 3.0, 1) == [2.0]
    assert sweep_values(0.0, 1.0, 0) == []
