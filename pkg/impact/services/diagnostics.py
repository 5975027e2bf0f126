"""
Diagnostics service.

This module checks a scenario's model before it is trusted: surface
gradients against finite differences, metric positive definiteness, stick
constraint rank and agreement of the closed-form projectors with the KKT
oracle and, for builtins, with the hand-derived formulas.
"""
from typing import Callable, List, Optional

import numpy as np

from impact.core.errors import ImpactError
from impact.core.geometry import (
    GeneralizedState,
    check_gradient,
    check_stick_rank,
    projection_oracle,
    triple_split,
    validate_metric,
)
from impact.core.logging import get_logger
from impact.core.tolerances import tolerances
from impact.models.base import ModelSpec
from impact.models.library import analytic_split_oracle
from impact.schemas.reports import CheckResult, DiagnosticsReport
from impact.schemas.scenario import ScenarioFile
from impact.services.scenario import build_model, build_state

logger = get_logger(__name__)

# Relative agreement required between projector implementations
PROJECTOR_TOLERANCE = 1e-9
# Extra configurations probed around the initial one
PROBE_COUNT = 4
PROBE_SCALE = 0.1


def probe_states(model: ModelSpec, state: GeneralizedState, seed: int = 0) -> List[GeneralizedState]:
    """
    Initial state plus deterministic perturbations inside the model domain.

    Perturbed configurations keep the initial velocity.
    """
    rng = np.random.default_rng(seed)
    states = [state]
    for _ in range(PROBE_COUNT):
        q = state.q + PROBE_SCALE * rng.standard_normal(model.dim)
        try:
            model.check_configuration(q)
        except ImpactError:
            continue
        states.append(state.evolve(q=q))
    return states


def _relative(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(a - b)) / max(1.0, float(np.max(np.abs(b)))))


def _run(name: str, check: Callable[[], CheckResult]) -> CheckResult:
    try:
        return check()
    except ImpactError as e:
        return CheckResult(name=name, passed=False, detail=f"{e.code}: {e.detail}")


def check_metric(model: ModelSpec, states: List[GeneralizedState]) -> CheckResult:
    """Smallest metric eigenvalue over the probe configurations."""
    smallest = min(validate_metric(np.asarray(model.metric.matrix_fn(s.q), dtype=float)) for s in states)
    return CheckResult(name="metric_spd", passed=True, value=smallest, detail="smallest eigenvalue")


def check_surface_gradient(model: ModelSpec, states: List[GeneralizedState]) -> CheckResult:
    """Largest relative deviation of the gradient from central differences."""
    deviation = max(check_gradient(model.surface, s.q) for s in states)
    passed = deviation <= tolerances.gradient_check
    return CheckResult(
        name="surface_gradient",
        passed=passed,
        value=deviation,
        detail="max relative deviation from finite differences"
        + ("" if passed else f" exceeds {tolerances.gradient_check:g}"),
    )


def check_rank(model: ModelSpec, states: List[GeneralizedState]) -> CheckResult:
    """Stick rows have full rank and are independent of the surface gradient."""
    for s in states:
        check_stick_rank(model.surface.regular_gradient(s.q), model.stick.at(s.q))
    return CheckResult(name="stick_rank", passed=True, detail=f"{len(states)} configurations")


def check_projectors(model: ModelSpec, states: List[GeneralizedState]) -> CheckResult:
    """Closed-form projectors against the KKT minimisation oracle."""
    worst = 0.0
    for s in states:
        G = model.metric.at(s.q)
        grad = model.surface.regular_gradient(s.q)
        split = triple_split(model.metric, model.surface, model.stick, s)
        parallel_B = projection_oracle(G, np.vstack([grad, model.stick.at(s.q)]), s.qdot)
        parallel_S = projection_oracle(G, grad[np.newaxis, :], s.qdot)
        worst = max(
            worst,
            _relative(split.parallel_B, parallel_B),
            _relative(split.ortho_S, s.qdot - parallel_S),
        )
    return CheckResult(
        name="projector_oracle",
        passed=worst <= PROJECTOR_TOLERANCE,
        value=worst,
        detail="max relative deviation from the KKT oracle",
    )


def check_analytic(model: ModelSpec, states: List[GeneralizedState]) -> CheckResult:
    """Generic split against the closed-form split of a builtin model."""
    worst = 0.0
    for s in states:
        generic = triple_split(model.metric, model.surface, model.stick, s)
        oracle = analytic_split_oracle(model, s)
        for a, b in (
            (generic.parallel_B, oracle.parallel_B),
            (generic.ortho_B, oracle.ortho_B),
            (generic.ortho_S, oracle.ortho_S),
        ):
            worst = max(worst, _relative(a, b))
    return CheckResult(
        name="analytic_oracle",
        passed=worst <= PROJECTOR_TOLERANCE,
        value=worst,
        detail=f"max relative deviation from the closed-form {model.name} split",
    )


def run_diagnostics(scenario: ScenarioFile, name: Optional[str] = None) -> DiagnosticsReport:
    """
    Run every applicable check on a scenario.

    Failures are collected, never raised.

    Args:
        scenario: Validated scenario
        name: Label used in the report

    Returns:
        DiagnosticsReport: All check results
    """
    label = name or "<scenario>"
    try:
        model = build_model(scenario.model)
        states = probe_states(model, build_state(scenario, model))
    except ImpactError as e:
        return DiagnosticsReport(
            scenario=label, checks=[CheckResult(name="build", passed=False, detail=f"{e.code}: {e.detail}")]
        )

    checks = [
        _run("metric_spd", lambda: check_metric(model, states)),
        _run("surface_gradient", lambda: check_surface_gradient(model, states)),
        _run("stick_rank", lambda: check_rank(model, states)),
        _run("projector_oracle", lambda: check_projectors(model, states)),
    ]
    if model.builtin:
        checks.append(_run("analytic_oracle", lambda: check_analytic(model, states)))

    report = DiagnosticsReport(scenario=label, checks=checks)
    logger.info_with_props(
        "Diagnostics finished",
        {"scenario": label, "passed": report.passed, "failed": [c.name for c in checks if not c.passed]},
    )
    return report
