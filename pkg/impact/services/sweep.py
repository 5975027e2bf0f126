"""
Parameter sweep service.

This module varies one scenario quantity over a list of values and
summarises each run, either a single impact resolution or a full simulation.
Runs execute concurrently in worker threads, bounded by
``settings.SWEEP_MAX_WORKERS``, and rows are returned in input order.
"""
import asyncio
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from pydantic import ValidationError

from impact.core.config import settings
from impact.core.errors import ContactError, DegenerateSurfaceError, ImpactError, UnknownParameterError
from impact.core.geometry import GeneralizedState
from impact.core.laws import Branch
from impact.core.logging import get_logger
from impact.core.tolerances import tolerances
from impact.models.base import ModelSpec
from impact.models.library import BUILTIN_PARAMETERS
from impact.schemas.laws import LAW_COEFFICIENTS
from impact.schemas.reports import SweepRow
from impact.schemas.scenario import ScenarioFile, SweepMode
from impact.services.scenario import build_config, build_model, build_state, validation_error
from impact.services.simulator import run_simulation

logger = get_logger(__name__)


@dataclass(frozen=True)
class SweepParameter:
    """Where a swept name lives in the scenario document."""

    name: str
    kind: str  # "model", "law", "q" or "qdot"
    key: str
    index: Optional[int] = None


def resolve_parameter(scenario: ScenarioFile, name: str) -> SweepParameter:
    """
    Locate a sweepable quantity by name.

    Accepted names are model parameters (m, R, L, A, g or custom names), law
    coefficients (e_S, e_B, mu_s, mu_d, as the law defines them),
    ``q.<coordinate>``, ``qdot.<coordinate>`` and bare coordinate names.

    Raises:
        UnknownParameterError: If the name matches nothing
    """
    section = scenario.model
    coordinates = section.coordinates

    if section.custom is not None:
        model_names = tuple(section.custom.parameters)
    else:
        model_names = BUILTIN_PARAMETERS[section.builtin or ""] + ("g",)
    if name in model_names:
        return SweepParameter(name=name, kind="model", key=name)

    if name in LAW_COEFFICIENTS[scenario.law.variant]:
        return SweepParameter(name=name, kind="law", key=name)

    prefix, _, coordinate = name.rpartition(".")
    if prefix in ("", "q", "qdot") and coordinate in coordinates:
        return SweepParameter(
            name=name, kind=prefix or "q", key=coordinate, index=coordinates.index(coordinate)
        )

    raise UnknownParameterError(parameter=name, data={"coordinates": coordinates})


def apply_parameter(scenario: ScenarioFile, parameter: SweepParameter, value: float) -> ScenarioFile:
    """
    Copy of a scenario with one quantity replaced and re-validated.

    Raises:
        ScenarioError: If the new value violates the schema
    """
    data: Dict[str, Any] = scenario.model_dump(by_alias=True, exclude_none=True, mode="json")
    if parameter.kind == "model":
        target = data["model"]["custom"] if scenario.model.custom is not None else data["model"]
        target.setdefault("parameters", {})[parameter.key] = value
    elif parameter.kind == "law":
        data["law"][parameter.key] = value
    else:
        data["initial"][parameter.kind][parameter.index] = value
    try:
        return ScenarioFile.model_validate(data)
    except ValidationError as e:
        raise validation_error(e)


def place_on_surface(
    model: ModelSpec,
    state: GeneralizedState,
    fixed: Sequence[int] = (),
    max_iterations: int = 50,
) -> GeneralizedState:
    """
    Move a configuration onto s(q) = 0 using only the non-fixed coordinates.

    Newton steps along the gradient restricted to the free coordinates.

    Args:
        model: Mechanical model
        state: State to move
        fixed: Indices of coordinates that stay put
        max_iterations: Newton iteration limit

    Returns:
        GeneralizedState: State on the surface with the same velocity

    Raises:
        DegenerateSurfaceError: If the free coordinates cannot change s
        ContactError: If Newton does not converge
    """
    q = np.array(state.q, dtype=float)
    free = np.ones(model.dim)
    free[list(fixed)] = 0.0
    for _ in range(max_iterations):
        gap = model.surface.value(q)
        if abs(gap) <= 1e-3 * tolerances.contact * (1.0 + float(np.linalg.norm(q))):
            return state.evolve(q=q)
        grad = model.surface.gradient(q) * free
        norm2 = float(grad @ grad)
        if norm2 <= tolerances.zero_vector:
            raise DegenerateSurfaceError("Free coordinates do not move the contact surface")
        q = q - gap * grad / norm2
    raise ContactError(
        "Could not place the state on the contact surface", code="placement_failed", data={"s": gap}
    )


def _resolve_row(scenario: ScenarioFile, parameter: SweepParameter, value: float, place: bool) -> SweepRow:
    model = build_model(scenario.model)
    state = build_state(scenario, model)
    if place:
        fixed = [parameter.index] if parameter.kind == "q" and parameter.index is not None else []
        state = place_on_surface(model, state, fixed)
    outcome = model.resolve(state, scenario.law)
    return SweepRow(
        value=value,
        branch=outcome.branch.value,
        right_velocity=outcome.right_velocity.tolist(),
        delta_energy=outcome.delta_energy,
    )


def _simulate_row(scenario: ScenarioFile, value: float) -> SweepRow:
    trajectory = run_simulation(build_config(scenario))
    impacts = trajectory.impacts
    return SweepRow(
        value=value,
        branch=impacts[0].branch.value if impacts else Branch.NONE.value,
        right_velocity=trajectory.final_state.qdot.tolist(),
        delta_energy=sum(event.delta_energy for event in impacts),
        impacts=len(impacts),
        status=trajectory.status.value,
    )


def evaluate_point(
    scenario: ScenarioFile,
    parameter: SweepParameter,
    value: float,
    mode: SweepMode = SweepMode.RESOLVE,
    place: bool = True,
) -> SweepRow:
    """
    Evaluate a sweep at one value.

    Engine errors are reported in the row instead of aborting the sweep.
    """
    try:
        variant = apply_parameter(scenario, parameter, value)
        if mode is SweepMode.SIMULATE:
            return _simulate_row(variant, value)
        return _resolve_row(variant, parameter, value, place)
    except ImpactError as e:
        logger.debug_with_props("Sweep point failed", {"value": value, "error_code": e.code})
        return SweepRow(value=value, branch="error", error=f"{e.code}: {e.detail}")


async def sweep_async(
    scenario: ScenarioFile,
    parameter: str,
    values: Sequence[float],
    mode: SweepMode = SweepMode.RESOLVE,
    place: bool = True,
    max_workers: Optional[int] = None,
) -> List[SweepRow]:
    """
    Evaluate a sweep concurrently.

    Args:
        scenario: Template scenario
        parameter: Name of the swept quantity
        values: Values to evaluate
        mode: Single impact resolution or full simulation
        place: Keep resolve-mode states on the contact surface
        max_workers: Concurrency bound, defaults to settings.SWEEP_MAX_WORKERS

    Returns:
        List[SweepRow]: One row per value, in input order

    Raises:
        UnknownParameterError: If the parameter does not exist
    """
    target = resolve_parameter(scenario, parameter)
    semaphore = asyncio.Semaphore(max_workers or settings.SWEEP_MAX_WORKERS)

    async def run_one(value: float) -> SweepRow:
        async with semaphore:
            return await asyncio.to_thread(evaluate_point, scenario, target, float(value), mode, place)

    rows = await asyncio.gather(*(run_one(value) for value in values))
    logger.info_with_props(
        "Sweep finished",
        {
            "parameter": parameter,
            "mode": mode.value,
            "values": len(rows),
            "errors": sum(1 for row in rows if row.error),
        },
    )
    return list(rows)


def sweep(
    scenario: ScenarioFile,
    parameter: str,
    values: Sequence[float],
    mode: SweepMode = SweepMode.RESOLVE,
    place: bool = True,
    max_workers: Optional[int] = None,
) -> List[SweepRow]:
    """Synchronous wrapper around sweep_async."""
    return asyncio.run(sweep_async(scenario, parameter, values, mode, place, max_workers))


def sweep_values(start: float, stop: float, count: int) -> List[float]:
    """Evenly spaced values from start to stop inclusive."""
    return [float(v) for v in np.linspace(start, stop, count)]
