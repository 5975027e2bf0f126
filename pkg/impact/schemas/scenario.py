"""
Scenario file schemas.

This module defines the validated structure of a scenario document: the
model (builtin or custom), the contact law, the initial state, the constant
generalized force and the simulation, output and sweep blocks.
"""
from enum import Enum
from typing import Annotated, Any, Dict, List, Optional

from pydantic import BeforeValidator, Field, field_validator, model_validator

from impact.models.library import BUILTIN_COORDINATES
from impact.schemas.base import BaseSchema, FloatList
from impact.schemas.laws import ContactLaw


def _number_as_text(value: Any) -> Any:
    if isinstance(value, bool):
        raise ValueError("booleans are not expressions")
    if isinstance(value, (int, float)):
        return repr(float(value))
    return value


# Expression text; bare numbers are accepted and converted
ExpressionText = Annotated[str, BeforeValidator(_number_as_text)]


class OutputFormat(str, Enum):
    """Report format enumeration."""

    CSV = "csv"
    JSON = "json"


class SweepMode(str, Enum):
    """Sweep evaluation mode."""

    RESOLVE = "resolve"
    SIMULATE = "simulate"


class CustomModelConfig(BaseSchema):
    """Model defined by expression text."""

    coordinates: List[str] = Field(min_length=2)
    parameters: Dict[str, float] = Field(default_factory=dict)
    metric: List[List[ExpressionText]]
    surface: ExpressionText
    surface_gradient: Optional[List[ExpressionText]] = None
    stick: List[List[ExpressionText]] = Field(min_length=1)

    @field_validator("coordinates")
    def unique_coordinates(cls, v: List[str]) -> List[str]:
        """Coordinate names must be distinct identifiers."""
        if len(set(v)) != len(v):
            raise ValueError("coordinate names must be unique")
        for name in v:
            if not name.isidentifier():
                raise ValueError(f"invalid coordinate name {name!r}")
        return v


class ModelSection(BaseSchema):
    """Either a builtin model with parameters or a custom model."""

    builtin: Optional[str] = None
    parameters: Dict[str, float] = Field(default_factory=dict)
    custom: Optional[CustomModelConfig] = None

    @model_validator(mode="after")
    def exactly_one_kind(self) -> "ModelSection":
        """Builtin and custom are mutually exclusive."""
        if (self.builtin is None) == (self.custom is None):
            raise ValueError("model needs exactly one of 'builtin' or 'custom'")
        if self.builtin is not None and self.builtin not in BUILTIN_COORDINATES:
            raise ValueError(
                f"unknown builtin model {self.builtin!r} (expected one of {', '.join(BUILTIN_COORDINATES)})"
            )
        if self.custom is not None and self.parameters:
            raise ValueError("custom model parameters belong inside 'custom'")
        return self

    @property
    def coordinates(self) -> List[str]:
        if self.custom is not None:
            return list(self.custom.coordinates)
        return list(BUILTIN_COORDINATES[self.builtin or ""])


class InitialState(BaseSchema):
    """Initial time, configuration and velocity."""

    t: float = 0.0
    q: FloatList
    qdot: FloatList


class SimulationSection(BaseSchema):
    """Time stepping and termination settings."""

    t_end: Optional[float] = None
    step: float = Field(1e-3, gt=0.0)
    max_impacts: int = Field(1000, ge=1)
    settle_speed: float = Field(1e-6, ge=0.0)


class OutputSection(BaseSchema):
    """Where and how reports are written."""

    format: OutputFormat = OutputFormat.CSV
    path: Optional[str] = None


class SweepSection(BaseSchema):
    """Defaults for the sweep command."""

    mode: SweepMode = SweepMode.RESOLVE
    parameter: Optional[str] = None
    start: Optional[float] = Field(None, alias="from")
    stop: Optional[float] = Field(None, alias="to")
    count: Optional[int] = Field(None, ge=1)
    place_on_surface: bool = True


class ScenarioFile(BaseSchema):
    """Scenario document."""

    model: ModelSection
    law: ContactLaw
    initial: InitialState
    force: Optional[List[ExpressionText]] = None
    simulation: SimulationSection = Field(default_factory=SimulationSection)
    output: OutputSection = Field(default_factory=OutputSection)
    sweep: Optional[SweepSection] = None

    @model_validator(mode="after")
    def consistent_dimensions(self) -> "ScenarioFile":
        """State and force lengths match the model's coordinates."""
        n = len(self.model.coordinates)
        if len(self.initial.q) != n or len(self.initial.qdot) != n:
            raise ValueError(
                f"initial q and qdot must have {n} entries "
                f"(got {len(self.initial.q)} and {len(self.initial.qdot)})"
            )
        if self.force is not None and len(self.force) != n:
            raise ValueError(f"force must have {n} entries (got {len(self.force)})")
        custom = self.model.custom
        if custom is not None:
            if len(custom.metric) != n or any(len(row) != n for row in custom.metric):
                raise ValueError(f"custom metric must be a {n}x{n} matrix")
            if any(len(row) != n for row in custom.stick):
                raise ValueError(f"custom stick rows must have {n} entries")
            if custom.surface_gradient is not None and len(custom.surface_gradient) != n:
                raise ValueError(f"custom surface_gradient must have {n} entries")
        t_end = self.simulation.t_end
        if t_end is not None and t_end <= self.initial.t:
            raise ValueError("simulation.t_end must be later than initial.t")
        return self
