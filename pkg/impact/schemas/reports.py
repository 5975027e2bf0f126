"""
Report schemas.

This module defines the serialized outputs of the resolve, simulate, sweep
and check commands.
"""
from typing import List, Optional

from pydantic import Field, computed_field

from impact.schemas.base import BaseSchema, FloatList


class SplitReport(BaseSchema):
    """Triple split of a left velocity."""

    parallel_B: FloatList
    ortho_B: FloatList
    ortho_S: FloatList
    norm_ortho_B: float
    norm_ortho_S: float


class ResolveReport(BaseSchema):
    """Outcome of a single impact."""

    model: str
    law: str
    time: float
    coordinates: List[str]
    branch: str
    effective_tangential_factor: float = Field(description="Coefficient of V⊥_B in the impulse")
    left_velocity: FloatList
    impulse: FloatList
    right_velocity: FloatList
    delta_energy: float
    stick_residual: float = Field(description="|C·qdot_R|, zero for a sticking contact with e_S = 0")
    split: SplitReport


class SampleReport(BaseSchema):
    """Trajectory sample."""

    t: float
    q: FloatList
    qdot: FloatList


class EventReport(BaseSchema):
    """Impact or settle event of a trajectory."""

    index: int
    t: float
    branch: str
    delta_energy: float
    total_energy_before: float
    total_energy_after: float
    impulse: FloatList
    pre_qdot: FloatList
    post_qdot: FloatList


class TrajectoryReport(BaseSchema):
    """Samples and events of a simulation run."""

    model: str
    law: str
    coordinates: List[str]
    status: str
    samples: List[SampleReport]
    events: List[EventReport]


class SweepRow(BaseSchema):
    """One value of a parameter sweep."""

    value: float
    branch: str
    right_velocity: FloatList = Field(default_factory=list)
    delta_energy: Optional[float] = None
    impacts: Optional[int] = None
    status: Optional[str] = None
    error: Optional[str] = None


class SweepReport(BaseSchema):
    """Rows of a parameter sweep."""

    parameter: str
    mode: str
    coordinates: List[str]
    rows: List[SweepRow]


class CheckResult(BaseSchema):
    """Outcome of one diagnostic check."""

    name: str
    passed: bool
    value: Optional[float] = None
    detail: str = ""


class DiagnosticsReport(BaseSchema):
    """All diagnostic checks of a scenario."""

    scenario: str
    checks: List[CheckResult]

    @computed_field  # type: ignore[misc]
    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)
