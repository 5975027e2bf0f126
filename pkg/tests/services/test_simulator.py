"""
Tests for the event-driven simulator.
"""
import math

import numpy as np
import pytest

from impact.core.errors import SimulationError
from impact.core.laws import Branch
from impact.models.custom import build_custom_model
from impact.models.library import build_point, build_rod
from impact.schemas.laws import CoulombStaticLaw, RestitutionLaw
from impact.services.scenario import ScenarioConfig, build_config, load_scenario
from impact.services.simulator import (
    TerminationReason,
    detect_impact,
    domain_exit_offset,
    in_domain,
    integrate_free_flight,
    run_simulation,
    total_energy,
)

G = 10.0


def bounce_config(e_s=0.5, **overrides):
    model = build_point(m=1.0, g=G)
    values = dict(
        model=model,
        law=CoulombStaticLaw(e_S=e_s, mu_s=0.0),
        initial=model.state(0.0, (0.0, 1.0), (0.0, 0.0)),
        force=model.gravity_force(),
        t_end=3.0,
        step=1e-3,
    )
    values.update(overrides)
    return ScenarioConfig(**values)


def test_free_flight_is_exact_for_constant_metric(falling_point):
    """Test the quadratic update under constant gravity."""
    state = falling_point.state(0.0, (0.0, 1.0), (0.3, 0.0))
    moved = integrate_free_flight(falling_point, falling_point.gravity_force(), state, 0.1)

    assert moved.time == pytest.approx(0.1)
    np.testing.assert_allclose(moved.q, (0.03, 0.95), atol=1e-15)
    np.testing.assert_allclose(moved.qdot, (0.3, -1.0), atol=1e-15)
    assert integrate_free_flight(falling_point, falling_point.gravity_force(), state, 0.0) is state


def test_free_flight_conserves_total_energy(falling_point):
    """Test that kinetic plus potential energy is constant in flight."""
    force = falling_point.gravity_force()
    state = falling_point.state(0.0, (0.0, 2.0), (1.0, 3.0))
    later = integrate_free_flight(falling_point, force, state, 0.37)

    assert total_energy(falling_point, force, later) == pytest.approx(total_energy(falling_point, force, state), abs=1e-12)


def test_runge_kutta_path_matches_exact_update(falling_point):
    """Test the configuration-dependent integration path on a constant metric."""
    custom = build_custom_model(
        coordinates=["x", "y"],
        parameters={"m": 1.0},
        metric=[["m", "0"], ["0", "m"]],
        surface="y",
        stick=[["1", "0"]],
    )
    assert not custom.metric.is_constant
    force = falling_point.gravity_force()
    state = falling_point.state(0.0, (0.0, 1.0), (0.5, 0.0))

    exact = integrate_free_flight(falling_point, force, state, 0.05)
    stepped = integrate_free_flight(custom, force, custom.state(0.0, state.q, state.qdot), 0.05)

    np.testing.assert_allclose(stepped.q, exact.q, atol=1e-14)
    np.testing.assert_allclose(stepped.qdot, exact.qdot, atol=1e-14)


def test_detect_impact_time(falling_point):
    """Test the located crossing time of a drop from height 1."""
    force = falling_point.gravity_force()
    state = falling_point.state(0.0, (0.0, 1.0), (0.0, 0.0))
    end = integrate_free_flight(falling_point, force, state, 0.5)

    assert detect_impact(falling_point, force, state, end, 0.5) == pytest.approx(math.sqrt(0.2), abs=1e-12)

    short = integrate_free_flight(falling_point, force, state, 0.4)
    assert detect_impact(falling_point, force, state, short, 0.4) is None

    leaving = falling_point.state(0.0, (0.0, 0.0), (0.0, 1.0))
    up = integrate_free_flight(falling_point, force, leaving, 0.1)
    assert detect_impact(falling_point, force, leaving, up, 0.1) is None


def test_detect_impact_finds_earliest_crossing():
    """Test a crossing that lands on a subdivision point."""
    model = build_point(m=1.0)
    force = np.zeros(2)
    # Straight flight through y = 0 at t = 0.25
    state = model.state(0.0, (0.0, 0.25), (1.0, -1.0))
    end = integrate_free_flight(model, force, state, 1.0)

    assert detect_impact(model, force, state, end, 1.0) == pytest.approx(0.25, abs=1e-12)


def test_bounce_apex_heights():
    """Test that rebound apexes decay geometrically with e_S²."""
    trajectory = run_simulation(bounce_config())
    impacts = trajectory.impacts

    assert impacts[0].time == pytest.approx(math.sqrt(0.2), abs=1e-9)
    for k, event in enumerate(impacts[:5], start=1):
        apex = event.post_qdot[1] ** 2 / (2.0 * G)
        assert apex == pytest.approx(0.5 ** (2 * k), rel=1e-6)
        assert event.branch is Branch.STICK
        assert event.delta_energy < 0.0
        assert event.total_energy_after <= event.total_energy_before


def test_bounce_settles():
    """Test that the accumulating impact sequence ends with a settle marker."""
    trajectory = run_simulation(bounce_config())

    assert trajectory.status is TerminationReason.SETTLED
    assert trajectory.events[-1].branch is Branch.SETTLED
    assert not trajectory.events[-1].is_impact
    assert 10 < len(trajectory.impacts) < 60
    assert trajectory.final_state.time < 1.5
    assert all(s.q[1] >= -1e-9 for s in trajectory.samples)
    times = [s.time for s in trajectory.samples]
    assert times == sorted(times)


def test_plastic_impact_settles_at_once():
    """Test that e_S = 0 ends the run at the first impact."""
    trajectory = run_simulation(bounce_config(e_s=0.0))

    assert trajectory.status is TerminationReason.SETTLED
    assert [e.branch for e in trajectory.events] == [Branch.STICK, Branch.SETTLED]
    np.testing.assert_allclose(trajectory.events[-1].post_qdot, (0.0, 0.0), atol=1e-12)


def test_settle_speed_stops_before_impact():
    """Test that a slow arrival is treated as resting contact."""
    trajectory = run_simulation(bounce_config(settle_speed=100.0))

    assert trajectory.status is TerminationReason.SETTLED
    assert trajectory.impacts == []
    assert len(trajectory.events) == 1


def test_max_impacts():
    """Test the impact limit."""
    trajectory = run_simulation(bounce_config(max_impacts=3))

    assert trajectory.status is TerminationReason.MAX_IMPACTS
    assert len(trajectory.impacts) == 3


def test_free_flight_to_t_end():
    """Test a run without impacts."""
    model = build_point(m=1.0, g=G)
    config = bounce_config(initial=model.state(0.0, (0.0, 10.0), (1.0, 0.0)), t_end=0.5, step=0.125)
    trajectory = run_simulation(config)

    assert trajectory.status is TerminationReason.T_END
    assert trajectory.events == []
    assert trajectory.final_state.time == 0.5
    assert len(trajectory.samples) == 5
    np.testing.assert_allclose(trajectory.final_state.q, (0.5, 10.0 - 5.0 * 0.25), atol=1e-12)


def test_vertical_rod_stays_vertical(scenario_dir):
    """Test that a vertical rod bounces without rotating or drifting."""
    trajectory = run_simulation(build_config(load_scenario(scenario_dir / "rod_vertical.json")))

    assert trajectory.impacts
    for sample in trajectory.samples:
        assert sample.q[0] == pytest.approx(0.0, abs=1e-9)
        assert sample.q[2] == pytest.approx(math.pi / 2, abs=1e-9)


def test_runs_are_deterministic():
    """Test that repeated runs produce identical samples."""
    first = run_simulation(bounce_config())
    second = run_simulation(bounce_config())

    assert len(first.samples) == len(second.samples)
    for a, b in zip(first.samples, second.samples):
        assert a.time == b.time
        np.testing.assert_array_equal(a.q, b.q)
        np.testing.assert_array_equal(a.qdot, b.qdot)


def test_unresolvable_impact_raises_with_context():
    """Test that impact failures carry the time and cause."""
    model = build_custom_model(
        coordinates=["x", "y"],
        parameters={},
        metric=[["1", "0"], ["0", "1"]],
        surface="y",
        stick=[["1", "0"]],
        surface_gradient=["0", "0"],
    )
    config = ScenarioConfig(
        model=model,
        law=RestitutionLaw(e_S=0.5),
        initial=model.state(0.0, (0.0, 1.0), (0.0, -1.0)),
        force=np.zeros(2),
        t_end=5.0,
        step=0.01,
    )
    with pytest.raises(SimulationError) as exc_info:
        run_simulation(config)

    error = exc_info.value
    assert error.data["cause"]["code"] == "degenerate_surface"
    assert error.data["time"] == pytest.approx(1.0, abs=1e-9)
    assert error.data["event_index"] == 0


def tipping_rod_config(**overrides):
    """Rod dropped at rest with one end low enough to rotate flat after its bounce."""
    rod = build_rod(m=1.0, L=1.0, A=1.0 / 3.0, g=9.81)
    values = dict(
        model=rod,
        law=CoulombStaticLaw(e_S=0.5, mu_s=0.3),
        initial=rod.state(0.0, (0.0, 1.5, 1.0), (0.0, 0.0, 0.0)),
        force=rod.gravity_force(),
        t_end=2.0,
        step=1e-3,
    )
    values.update(overrides)
    return ScenarioConfig(**values)


def test_rod_leaving_domain_halts_cleanly():
    """Test that a rod rotating through the flat position stops the run at the crossing."""
    trajectory = run_simulation(tipping_rod_config())

    assert trajectory.status is TerminationReason.DOMAIN_EXIT
    assert trajectory.impacts
    marker = trajectory.events[-1]
    assert marker.branch is Branch.DOMAIN_EXIT
    assert not marker.is_impact
    assert marker.time == trajectory.final_state.time
    assert 0.5 < marker.time < 0.7
    for sample in trajectory.samples:
        assert 0.0 < sample.q[2] < math.pi
    assert trajectory.final_state.q[2] < 1e-6


def test_domain_exit_offset_brackets_crossing(rod):
    """Test that the exit offset is the last valid instant of the step."""
    state = rod.state(0.0, (0.0, 2.0, 0.05), (0.0, 0.0, -1.0))
    force = np.zeros(3)

    offset = domain_exit_offset(rod, force, state, 0.1)

    assert offset == pytest.approx(0.05, abs=1e-12)
    assert in_domain(rod, integrate_free_flight(rod, force, state, offset).q)
    assert not in_domain(rod, integrate_free_flight(rod, force, state, 0.1).q)


def test_run_starting_at_contact_resolves_first():
    """Test that an initial state on the surface and approaching it is an impact."""
    model = build_point(m=1.0, g=G)
    config = bounce_config(initial=model.state(0.0, (0.0, 0.0), (1.0, -1.0)), t_end=0.05)
    trajectory = run_simulation(config)

    first = trajectory.events[0]
    assert first.time == 0.0
    np.testing.assert_allclose(first.pre_qdot, (1.0, -1.0))
    np.testing.assert_allclose(first.post_qdot, (1.0, 0.5), atol=1e-12)
    assert trajectory.samples[1].q[1] > 0.0
