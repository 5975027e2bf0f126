"""
Tests for the contact laws and impact resolution.
"""
from unittest import mock

import numpy as np
import pytest

from impact.core.errors import ContactError, GrazingImpactError, ParameterError, UndefinedRatioError
from impact.core.geometry import ContactSurface, GeneralizedState, MassMetric, StickConstraint, split_velocity
from impact.core.laws import (
    Branch,
    double_restitution_impulse,
    energy_balance,
    friction_restitution_eB,
    reactive_impulse,
    resolve_impact,
    right_velocity_formula,
    stick_residual,
)
from impact.models.library import point_right_velocity
from impact.schemas.laws import (
    CoulombDynamicLaw,
    CoulombStaticLaw,
    DoubleRestitutionLaw,
    IdealLaw,
    RestitutionLaw,
)


def random_impact(rng, n=None):
    """Random metric, surface through the origin, stick rows and approaching velocity."""
    n = n or int(rng.integers(2, 7))
    M = rng.standard_normal((n, n))
    G = M @ M.T + n * np.eye(n)
    grad = rng.standard_normal(n)
    C = rng.standard_normal((int(rng.integers(1, n)), n))
    qdot = rng.standard_normal(n)
    if grad @ qdot > 0.0:
        qdot = -qdot
    metric = MassMetric.constant(G)
    surface = ContactSurface(dim=n, value_fn=lambda q: float(grad @ q), gradient_fn=lambda q: grad)
    stick = StickConstraint(dim=n, rows_fn=lambda q: C)
    state = GeneralizedState(time=0.0, q=np.zeros(n), qdot=qdot)
    return G, grad, C, metric, surface, stick, state


def random_law(rng):
    e_s = float(rng.uniform(0.0, 1.0))
    mu_s = float(rng.uniform(0.0, 2.0))
    choice = int(rng.integers(0, 5))
    if choice == 0:
        return IdealLaw()
    if choice == 1:
        return RestitutionLaw(e_S=e_s)
    if choice == 2:
        return DoubleRestitutionLaw(e_S=e_s, e_B=float(rng.uniform(0.0, 0.99)))
    if choice == 3:
        return CoulombStaticLaw(e_S=e_s, mu_s=mu_s)
    return CoulombDynamicLaw(e_S=e_s, mu_s=mu_s, mu_d=float(rng.uniform(0.0, mu_s)))


@pytest.mark.parametrize(
    "qdot, branch, expected",
    [
        ((1.0, -1.0), Branch.SLIP, (0.5, 0.5)),
        ((0.4, -1.0), Branch.STICK, (0.0, 0.5)),
    ],
)
def test_point_example(point, qdot, branch, expected):
    """Test the material point stick and slip outcomes."""
    law = CoulombStaticLaw(e_S=0.5, mu_s=0.5)
    outcome = point.resolve(point.state(0.0, (0.0, 0.0), qdot), law)
    oracle, oracle_branch = point_right_velocity(qdot, e_s=0.5, mu_s=0.5)

    assert outcome.branch is branch
    assert oracle_branch is branch
    np.testing.assert_allclose(outcome.right_velocity, expected, atol=1e-12)
    np.testing.assert_allclose(oracle, expected, atol=1e-12)


def test_dynamic_friction_sets_slip_magnitude(point):
    """Test that mu_d scales the slip while mu_s selects the branch."""
    law = CoulombDynamicLaw(e_S=0.5, mu_s=0.5, mu_d=0.2)
    outcome = point.resolve(point.state(0.0, (0.0, 0.0), (1.0, -1.0)), law)

    assert outcome.branch is Branch.SLIP
    np.testing.assert_allclose(outcome.right_velocity, (0.8, 0.5), atol=1e-12)


def test_dynamic_law_rejects_mu_d_above_mu_s():
    """Test the coefficient ordering of the dynamic law."""
    with pytest.raises(ValueError):
        CoulombDynamicLaw(e_S=0.5, mu_s=0.2, mu_d=0.5)


def test_energy_identity(rng):
    """Test the kinetic energy balance over random impacts and laws."""
    for _ in range(1000):
        G, grad, C, metric, surface, stick, state = random_impact(rng)
        law = random_law(rng)
        outcome = resolve_impact(metric, surface, stick, state, law)
        formula = energy_balance(G, outcome.split, law.e_s, outcome.effective_tangential_factor)

        assert abs(outcome.delta_energy - formula) <= 1e-9 * (1.0 + abs(formula))
        assert outcome.delta_energy <= 1e-12 * (1.0 + abs(formula))


def test_ideal_law_without_tangential_part_conserves_energy(point):
    """Test that a head-on ideal impact keeps its energy exactly."""
    outcome = point.resolve(point.state(0.0, (0.0, 0.0), (0.0, -1.0)), IdealLaw())

    np.testing.assert_array_equal(outcome.right_velocity, (0.0, 1.0))
    assert outcome.delta_energy == 0.0


def test_zero_friction_reduces_to_restitution(rng):
    """Test that a frictionless Coulomb law acts like plain restitution."""
    for _ in range(500):
        _, _, _, metric, surface, stick, state = random_impact(rng)
        e_s = float(rng.uniform(0.0, 1.0))
        coulomb = resolve_impact(metric, surface, stick, state, CoulombStaticLaw(e_S=e_s, mu_s=0.0))
        smooth = resolve_impact(metric, surface, stick, state, RestitutionLaw(e_S=e_s))

        np.testing.assert_allclose(coulomb.right_velocity, smooth.right_velocity, rtol=0.0, atol=1e-12)


def test_static_law_continuous_at_cone_boundary(rng):
    """Test that both branch formulas agree when |V⊥_B| = mu_s |V⊥_S|."""
    for _ in range(200):
        G, grad, C, _, _, _, state = random_impact(rng)
        split = split_velocity(G, grad, C, state.qdot)
        mu_s = split.norm_ortho_B / split.norm_ortho_S
        e_s = float(rng.uniform(0.0, 1.0))

        stick = right_velocity_formula(split, e_s, 1.0)
        slip = right_velocity_formula(split, e_s, mu_s * split.norm_ortho_S / split.norm_ortho_B)
        scale = 1.0 + float(np.max(np.abs(stick)))

        np.testing.assert_allclose(slip, stick, rtol=0.0, atol=1e-9 * scale)


def test_cone_boundary_tie_sticks(point):
    """Test that a velocity exactly on the friction cone sticks."""
    outcome = point.resolve(point.state(0.0, (0.0, 0.0), (0.5, -1.0)), CoulombStaticLaw(e_S=0.5, mu_s=0.5))

    assert outcome.branch is Branch.STICK
    np.testing.assert_allclose(outcome.right_velocity, (0.0, 0.5), atol=1e-12)


def test_stick_branch_stops_contact_point(rng):
    """Test that a sticking plastic impact leaves C·qdot_R = 0."""
    for _ in range(100):
        _, _, C, metric, surface, stick, state = random_impact(rng)
        outcome = resolve_impact(metric, surface, stick, state, CoulombStaticLaw(e_S=0.0, mu_s=1e6))

        assert outcome.branch is Branch.STICK
        assert stick_residual(C, outcome.right_velocity) < 1e-9 * (1.0 + float(np.linalg.norm(state.qdot)))


def test_friction_restitution_reproduces_static_law(rng):
    """Test that the friction-derived e_B gives the Coulomb impulse."""
    for _ in range(100):
        G, grad, C, _, _, _, state = random_impact(rng)
        split = split_velocity(G, grad, C, state.qdot)
        e_s, mu_s = float(rng.uniform(0.0, 1.0)), float(rng.uniform(0.0, 2.0))

        e_b = friction_restitution_eB(split, mu_s)
        impulse, _, _ = reactive_impulse(CoulombStaticLaw(e_S=e_s, mu_s=mu_s), split)

        assert -1.0 <= e_b <= 0.0
        np.testing.assert_allclose(double_restitution_impulse(split, e_s, e_b), impulse, atol=1e-12)


def test_slip_keeps_tangential_direction(rng):
    """Test that after slipping the residual V⊥_B is a non-negative multiple of the incoming one."""
    slips = 0
    for _ in range(500):
        G, grad, C, metric, surface, stick, state = random_impact(rng)
        mu_s = float(rng.uniform(0.0, 0.5))
        law = CoulombDynamicLaw(e_S=float(rng.uniform(0.0, 1.0)), mu_s=mu_s, mu_d=float(rng.uniform(0.0, mu_s)))
        outcome = resolve_impact(metric, surface, stick, state, law)
        if outcome.branch is not Branch.SLIP:
            continue
        slips += 1

        incoming = outcome.split.ortho_B
        residual = split_velocity(G, grad, C, outcome.right_velocity).ortho_B
        factor = float(residual @ G @ incoming) / float(incoming @ G @ incoming)

        assert factor >= 0.0
        assert factor == pytest.approx(1.0 - outcome.effective_tangential_factor, abs=1e-9)
        np.testing.assert_allclose(residual, factor * incoming, atol=1e-9 * (1.0 + outcome.split.norm_total))
    assert slips > 50


def test_positive_scaling(rng):
    """Test that scaling the left velocity keeps the branch and scales the right velocity."""
    for _ in range(500):
        _, _, _, metric, surface, stick, state = random_impact(rng)
        law = random_law(rng)
        alpha = float(rng.uniform(0.1, 10.0))

        base = resolve_impact(metric, surface, stick, state, law)
        scaled = resolve_impact(metric, surface, stick, state.evolve(qdot=alpha * state.qdot), law)

        assert scaled.branch is base.branch
        np.testing.assert_allclose(
            scaled.right_velocity, alpha * base.right_velocity, rtol=1e-9, atol=1e-10 * alpha
        )
        assert scaled.delta_energy == pytest.approx(alpha**2 * base.delta_energy, rel=1e-9, abs=1e-9 * alpha**2)


def test_partial_restitution_strictly_dissipates(rng):
    """Test that e_S < 1 loses at least (1 − e_S²)/2·‖V⊥_S‖² of kinetic energy."""
    for _ in range(1000):
        G, _, _, metric, surface, stick, state = random_impact(rng)
        law = random_law(rng)
        if isinstance(law, IdealLaw):
            continue
        outcome = resolve_impact(metric, surface, stick, state, law)
        normal_loss = 0.5 * (1.0 - law.e_s**2) * outcome.split.norm_ortho_S**2

        assert outcome.delta_energy < 0.0
        assert outcome.delta_energy <= -normal_loss + 1e-9 * (1.0 + normal_loss)


def test_friction_restitution_undefined_without_tangential_part(point):
    """Test the ratio guard."""
    split = point.split(point.state(0.0, (0.0, 0.0), (0.0, -1.0)))
    with pytest.raises(UndefinedRatioError):
        friction_restitution_eB(split, 0.5)


def test_double_restitution(point):
    """Test the impulse with a tangential restitution coefficient."""
    law = DoubleRestitutionLaw(e_S=0.5, e_B=0.5)
    outcome = point.resolve(point.state(0.0, (0.0, 0.0), (1.0, -1.0)), law)

    assert outcome.effective_tangential_factor == pytest.approx(1.5)
    np.testing.assert_allclose(outcome.right_velocity, (-0.5, 0.5), atol=1e-12)


def test_energy_balance_parameter_ranges(point):
    """Test the admissible ranges of e_S and lambda."""
    split = point.split(point.state(0.0, (0.0, 0.0), (1.0, -1.0)))
    G = np.eye(2)

    with pytest.raises(ParameterError):
        energy_balance(G, split, 1.5, 0.0)
    with pytest.raises(ParameterError):
        energy_balance(G, split, 0.5, 2.5)
    assert energy_balance(G, split, 1.0, 2.0) == pytest.approx(0.0)


def test_resolve_rejects_non_impacts(point):
    """Test the contact preconditions."""
    law = RestitutionLaw(e_S=0.5)

    with pytest.raises(ContactError):
        point.resolve(point.state(0.0, (0.0, 0.5), (0.0, -1.0)), law)

    with pytest.raises(ContactError) as exc_info:
        point.resolve(point.state(0.0, (0.0, 0.0), (0.0, 1.0)), law)
    assert exc_info.value.code == "separating"

    with pytest.raises(GrazingImpactError):
        point.resolve(point.state(0.0, (0.0, 0.0), (1.0, 0.0)), law)


def test_resolve_records_telemetry(point):
    """Test that resolved impacts are counted by branch and law."""
    with mock.patch("impact.core.laws.impacts_resolved") as counter, mock.patch(
        "impact.core.laws.resolve_time"
    ) as histogram:
        point.resolve(point.state(0.0, (0.0, 0.0), (1.0, -1.0)), CoulombStaticLaw(e_S=0.5, mu_s=0.5))

    counter.add.assert_called_once_with(1, {"branch": "slip", "law": "coulomb_static"})
    histogram.record.assert_called_once()
