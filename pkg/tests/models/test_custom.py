"""
Tests for models defined by expression text.
"""
import math

import numpy as np
import pytest

from impact.core.errors import ContractViolationError, ExpressionError, ExpressionSyntaxError, MetricError
from impact.core.geometry import check_gradient
from impact.models.custom import build_custom_model
from impact.schemas.laws import CoulombStaticLaw

ROD = dict(
    coordinates=["x", "y", "th"],
    parameters={"m": 1.0, "L": 1.0, "A": 1.0 / 3.0},
    metric=[["m", "0", "0"], ["0", "m", "0"], ["0", "0", "A"]],
    surface="y - L*sin(th)",
    stick=[["1", "0", "-L*sin(th)"]],
)


def test_custom_point_matches_builtin(point):
    """Test that the point written as expressions resolves like the builtin."""
    custom = build_custom_model(
        coordinates=["x", "y"],
        parameters={"m": 1.0},
        metric=[["m", "0"], ["0", "m"]],
        surface="y",
        stick=[["1", "0"]],
    )
    law = CoulombStaticLaw(e_S=0.5, mu_s=0.5)
    for qdot in ((1.0, -1.0), (0.4, -1.0), (-2.0, -0.5)):
        expected = point.resolve(point.state(0.0, (0.0, 0.0), qdot), law)
        outcome = custom.resolve(custom.state(0.0, (0.0, 0.0), qdot), law)

        assert outcome.branch is expected.branch
        np.testing.assert_allclose(outcome.right_velocity, expected.right_velocity, atol=1e-12)


def test_custom_rod_symbolic_gradient_matches_builtin(rod, rng):
    """Test the derived surface gradient against the builtin rod."""
    custom = build_custom_model(**ROD)
    law = CoulombStaticLaw(e_S=0.5, mu_s=0.3)
    for _ in range(20):
        theta = float(rng.uniform(0.1, math.pi - 0.1))
        q = (0.0, math.sin(theta), theta)
        qdot = (float(rng.normal()), -1.0, float(rng.normal()))

        np.testing.assert_allclose(custom.surface.gradient(q), rod.surface.gradient(q), atol=1e-15)
        if float(rod.surface.gradient(q) @ qdot) >= 0.0:
            continue
        expected = rod.resolve(rod.state(0.0, q, qdot), law)
        outcome = custom.resolve(custom.state(0.0, q, qdot), law)
        assert outcome.branch is expected.branch
        np.testing.assert_allclose(outcome.right_velocity, expected.right_velocity, atol=1e-12)


def test_hand_written_gradient_is_used():
    """Test that a supplied gradient replaces the symbolic one, right or wrong."""
    good = build_custom_model(**ROD, surface_gradient=["0", "1", "-L*cos(th)"])
    wrong = build_custom_model(**ROD, surface_gradient=["0", "1", "L*cos(th)"])
    q = (0.0, math.sin(0.7), 0.7)

    assert check_gradient(good.surface, q) < 1e-6
    assert check_gradient(wrong.surface, q) > 1e-3


def test_undefined_names_rejected():
    """Test that expressions may only use coordinates and parameters."""
    with pytest.raises(ExpressionError) as exc_info:
        build_custom_model(**{**ROD, "surface": "y - R*sin(th)"})
    assert exc_info.value.code == "undefined_name"
    assert exc_info.value.data["names"] == ["R"]


def test_syntax_error_reported_with_column():
    """Test that parse errors keep their column."""
    with pytest.raises(ExpressionSyntaxError) as exc_info:
        build_custom_model(**{**ROD, "surface": "y -"})
    assert exc_info.value.column == 4


def test_inconsistent_shapes():
    """Test dimension checks on the expression matrices."""
    with pytest.raises(ContractViolationError):
        build_custom_model(**{**ROD, "metric": [["m", "0"], ["0", "m"]]})
    with pytest.raises(ContractViolationError):
        build_custom_model(**{**ROD, "stick": [["1", "0"]]})
    with pytest.raises(ContractViolationError):
        build_custom_model(**{**ROD, "parameters": {"m": 1.0, "L": 1.0, "A": 1.0, "th": 0.0}})
    with pytest.raises(ContractViolationError):
        build_custom_model(**ROD, surface_gradient=["0", "1"])


def test_configuration_dependent_metric_checked_where_evaluated():
    """Test that a metric losing definiteness fails only where it does."""
    model = build_custom_model(
        coordinates=["x", "y"],
        parameters={},
        metric=[["1 + x", "0"], ["0", "1"]],
        surface="y",
        stick=[["1", "0"]],
    )
    law = CoulombStaticLaw(e_S=0.5, mu_s=0.5)

    model.resolve(model.state(0.0, (0.5, 0.0), (1.0, -1.0)), law)
    with pytest.raises(MetricError) as exc_info:
        model.resolve(model.state(0.0, (-2.0, 0.0), (1.0, -1.0)), law)
    assert "negative" in exc_info.value.detail
