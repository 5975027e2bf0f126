"""
Scenario service.

This module loads scenario files, maps validation failures to ScenarioError
with file positions, and turns a validated document into a model, a contact
law, an initial state, a force and a simulation configuration.
"""
from pathlib import Path
from typing import Any, List, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from impact.core.errors import ScenarioError
from impact.core.expressions import evaluate, parse
from impact.core.geometry import GeneralizedState, Vector, frozen_vector
from impact.core.logging import get_logger
from impact.models.base import ModelSpec
from impact.models.custom import build_custom_model
from impact.models.library import build_builtin
from impact.schemas.laws import ContactLaw
from impact.schemas.scenario import ModelSection, ScenarioFile

logger = get_logger(__name__)


def _describe(errors: List[Any]) -> List[str]:
    lines = []
    for error in errors:
        location = ".".join(str(part) for part in error.get("loc", ())) or "<document>"
        lines.append(f"{location}: {error.get('msg', 'invalid')}")
    return lines


def validation_error(e: ValidationError, path: Union[str, Path, None] = None) -> ScenarioError:
    """
    Convert a pydantic ValidationError into a ScenarioError.

    JSON syntax errors keep pydantic's line and column text.
    """
    messages = _describe(e.errors())
    where = f"{path}: " if path else ""
    return ScenarioError(
        f"{where}{'; '.join(messages)}",
        path=str(path) if path else None,
        data={"errors": messages},
    )


def parse_scenario(text: str, path: Union[str, Path, None] = None) -> ScenarioFile:
    """
    Validate scenario JSON text.

    Raises:
        ScenarioError: On JSON syntax or schema errors
    """
    try:
        return ScenarioFile.model_validate_json(text)
    except ValidationError as e:
        raise validation_error(e, path)


def load_scenario(path: Union[str, Path]) -> ScenarioFile:
    """
    Read and validate a scenario file.

    Args:
        path: Path of a UTF-8 JSON document

    Returns:
        ScenarioFile: The validated document

    Raises:
        ScenarioError: If the file cannot be read or does not validate
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioError(f"Cannot read scenario {path}: {e.strerror or e}", path=str(path))
    scenario = parse_scenario(text, path)
    logger.debug_with_props("Scenario loaded", {"path": str(path), "law": scenario.law.variant})
    return scenario


def build_model(section: ModelSection) -> ModelSpec:
    """Build the ModelSpec described by a model section."""
    if section.custom is not None:
        custom = section.custom
        return build_custom_model(
            coordinates=custom.coordinates,
            parameters=custom.parameters,
            metric=custom.metric,
            surface=custom.surface,
            stick=custom.stick,
            surface_gradient=custom.surface_gradient,
        )
    return build_builtin(section.builtin or "", section.parameters)


def build_state(scenario: ScenarioFile, model: ModelSpec) -> GeneralizedState:
    """Initial state of a scenario."""
    return model.state(scenario.initial.t, scenario.initial.q, scenario.initial.qdot)


def build_force(scenario: ScenarioFile, model: ModelSpec) -> Vector:
    """
    Constant generalized force.

    Entries may be expressions of the model parameters. Without a force
    entry the model's weight is used when it defines g, else zero.
    """
    if scenario.force is None:
        return frozen_vector(model.gravity_force())
    env = dict(model.parameters)
    return frozen_vector([evaluate(parse(text), env) for text in scenario.force])


class ScenarioConfig(BaseModel):
    """Everything a simulation run needs."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    model: ModelSpec
    law: ContactLaw
    initial: GeneralizedState
    force: np.ndarray
    t_end: float
    step: float = Field(1e-3, gt=0.0)
    max_impacts: int = Field(1000, ge=1)
    settle_speed: float = Field(1e-6, ge=0.0)

    @field_validator("force", mode="before")
    def coerce_force(cls, v: Any) -> np.ndarray:
        """Store the force as a read-only float array."""
        return frozen_vector(np.asarray(v, dtype=float))

    @model_validator(mode="after")
    def check_invariants(self) -> "ScenarioConfig":
        """Force length matches the model and the run has positive duration."""
        if self.force.shape != (self.model.dim,):
            raise ValueError(f"force must have {self.model.dim} entries")
        if self.initial.dim != self.model.dim:
            raise ValueError(f"initial state must have {self.model.dim} coordinates")
        if not self.t_end > self.initial.time:
            raise ValueError("t_end must be later than the initial time")
        return self


def build_config(scenario: ScenarioFile, path: Union[str, Path, None] = None) -> ScenarioConfig:
    """
    Build a simulation configuration.

    Raises:
        ScenarioError: If t_end is missing or the configuration is invalid
    """
    simulation = scenario.simulation
    if simulation.t_end is None:
        raise ScenarioError("simulation.t_end is required to simulate", path=str(path) if path else None)
    model = build_model(scenario.model)
    try:
        return ScenarioConfig(
            model=model,
            law=scenario.law,
            initial=build_state(scenario, model),
            force=build_force(scenario, model),
            t_end=simulation.t_end,
            step=simulation.step,
            max_impacts=simulation.max_impacts,
            settle_speed=simulation.settle_speed,
        )
    except ValidationError as e:
        raise validation_error(e, path)
