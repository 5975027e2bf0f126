"""
Mechanical model base.

This module defines ModelSpec, the bundle of coordinates, parameters, mass
metric, contact surface and stick constraint that describes one impacting
system.
"""
from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Tuple

import numpy as np
from numpy.typing import ArrayLike

from impact.core.errors import ContractViolationError, ParameterError
from impact.core.geometry import (
    ContactSurface,
    GeneralizedState,
    MassMetric,
    StickConstraint,
    Vector,
    VelocitySplit,
    as_vector,
    triple_split,
)
from impact.core.laws import AnyLaw, ImpactOutcome, resolve_impact

DomainCheck = Callable[[Vector], None]


def require_positive(**parameters: float) -> None:
    """
    Check that physical parameters are strictly positive.

    Raises:
        ParameterError: Naming the first offending parameter
    """
    for name, value in parameters.items():
        if not np.isfinite(value) or value <= 0.0:
            raise ParameterError(f"Parameter {name} must be positive, got {value!r}", parameter=name)


@dataclass(frozen=True)
class ModelSpec:
    """An impacting mechanical system in generalized coordinates."""

    name: str
    coordinates: Tuple[str, ...]
    parameters: Mapping[str, float]
    metric: MassMetric
    surface: ContactSurface
    stick: StickConstraint
    domain_check: Optional[DomainCheck] = None
    builtin: bool = False
    gravity_axis: Optional[int] = None

    def __post_init__(self) -> None:
        n = len(self.coordinates)
        if len(set(self.coordinates)) != n:
            raise ContractViolationError("Coordinate names must be unique")
        for part in (self.metric, self.surface, self.stick):
            if part.dim != n:
                raise ContractViolationError(
                    f"{type(part).__name__} has dimension {part.dim}, expected {n}"
                )

    @property
    def dim(self) -> int:
        return len(self.coordinates)

    def check_configuration(self, q: ArrayLike) -> None:
        """Raise ConfigurationError when q lies outside the model domain."""
        if self.domain_check is not None:
            self.domain_check(as_vector(q, "q", self.dim))

    def state(self, time: float, q: ArrayLike, qdot: ArrayLike) -> GeneralizedState:
        """Build a state with the model's dimension."""
        return GeneralizedState(
            time=time, q=as_vector(q, "q", self.dim), qdot=as_vector(qdot, "qdot", self.dim)
        )

    def gravity_force(self) -> Vector:
        """
        Constant generalized weight (0, −m·g, …) when the model defines g.

        Returns the zero vector for models without gravity.
        """
        force = np.zeros(self.dim)
        g = self.parameters.get("g")
        if g is not None and self.gravity_axis is not None:
            force[self.gravity_axis] = -self.parameters["m"] * g
        return force

    def split(self, state: GeneralizedState) -> VelocitySplit:
        """Triple split of the state's velocity."""
        self.check_configuration(state.q)
        return triple_split(self.metric, self.surface, self.stick, state)

    def resolve(self, state: GeneralizedState, law: AnyLaw) -> ImpactOutcome:
        """Resolve an impact of this model at the given state."""
        self.check_configuration(state.q)
        return resolve_impact(self.metric, self.surface, self.stick, state, law)
