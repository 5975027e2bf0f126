"""
Constitutive laws module.

This module maps a left velocity to a reactive impulse and a right velocity
for the five contact laws, selects the stick or slip branch of the Coulomb
laws and evaluates the kinetic energy balance of an impact.

Every law produces an impulse of the form

    I = −(1 + e_S)·V⊥_S − λ·V⊥_B

with λ = 0 for the smooth laws, λ = 1 + e_B for double restitution, λ = 1 on
the stick branch and λ = μ‖V⊥_S‖/‖V⊥_B‖ on the slip branch.
"""
import time
from dataclasses import dataclass
from enum import Enum
from typing import Tuple, Union

import numpy as np

from impact.core.errors import (
    ContactError,
    EnergyBalanceError,
    GrazingImpactError,
    ParameterError,
    UndefinedRatioError,
)
from impact.core.geometry import (
    ContactSurface,
    GeneralizedState,
    MassMetric,
    Matrix,
    StickConstraint,
    Vector,
    VelocitySplit,
    frozen_vector,
    kinetic_energy,
    metric_norm,
    split_velocity,
)
from impact.core.logging import get_logger
from impact.core.telemetry import impacts_resolved, resolve_time
from impact.core.tolerances import tolerances
from impact.schemas.laws import (
    CoulombDynamicLaw,
    CoulombStaticLaw,
    DoubleRestitutionLaw,
    IdealLaw,
    RestitutionLaw,
)

logger = get_logger(__name__)

AnyLaw = Union[IdealLaw, RestitutionLaw, DoubleRestitutionLaw, CoulombStaticLaw, CoulombDynamicLaw]


class Branch(str, Enum):
    """Outcome branch of an impact."""

    STICK = "stick"
    SLIP = "slip"
    NONE = "n/a"
    # Simulator termination markers, never produced by a law
    SETTLED = "settled"
    DOMAIN_EXIT = "domain_exit"


@dataclass(frozen=True)
class ImpactOutcome:
    """Resolved impact: impulse, right velocity, branch and energy change."""

    law: str
    left_velocity: Vector
    impulse: Vector
    right_velocity: Vector
    branch: Branch
    effective_tangential_factor: float
    delta_energy: float
    split: VelocitySplit


def restitution_of(law: AnyLaw) -> float:
    """Restitution coefficient e_S of a law (1 for the ideal law)."""
    return float(law.e_s)


def double_restitution_impulse(split: VelocitySplit, e_s: float, e_b: float) -> Vector:
    """
    Impulse −(1+e_S)·V⊥_S − (1+e_B)·V⊥_B.

    e_B may range over [−1, 1) so that the friction-derived coefficient of the
    static Coulomb law can be fed back in.
    """
    if not -1.0 <= e_b < 1.0:
        raise ParameterError("e_B must lie in [-1, 1)", parameter="e_B")
    return -(1.0 + e_s) * split.ortho_S - (1.0 + e_b) * split.ortho_B


def _coulomb(
    split: VelocitySplit, e_s: float, mu_s: float, mu_slip: float
) -> Tuple[Vector, Branch, float]:
    norm_b, norm_s = split.norm_ortho_B, split.norm_ortho_S
    # Ties go to stick, matching the "≤" of the cone condition
    if split.is_negligible(norm_b) or norm_b <= mu_s * norm_s:
        lam, branch = 1.0, Branch.STICK
    else:
        lam, branch = mu_slip * norm_s / norm_b, Branch.SLIP
    return -(1.0 + e_s) * split.ortho_S - lam * split.ortho_B, branch, lam


def reactive_impulse(law: AnyLaw, split: VelocitySplit) -> Tuple[Vector, Branch, float]:
    """
    Reactive impulse of a contact law.

    Args:
        law: Contact law
        split: Triple split of the left velocity

    Returns:
        Tuple containing:
        - Vector: the impulse I
        - Branch: stick/slip for Coulomb laws, n/a otherwise
        - float: λ, the coefficient multiplying V⊥_B
    """
    match law:
        case IdealLaw():
            return -2.0 * split.ortho_S, Branch.NONE, 0.0
        case RestitutionLaw():
            return -(1.0 + law.e_s) * split.ortho_S, Branch.NONE, 0.0
        case DoubleRestitutionLaw():
            return double_restitution_impulse(split, law.e_s, law.e_b), Branch.NONE, 1.0 + law.e_b
        case CoulombStaticLaw():
            return _coulomb(split, law.e_s, law.mu_s, law.mu_s)
        case CoulombDynamicLaw():
            # Branch test uses mu_s, slip magnitude uses mu_d
            return _coulomb(split, law.e_s, law.mu_s, law.mu_d)
    raise ParameterError(f"Unsupported contact law: {type(law).__name__}")


def friction_restitution_eB(split: VelocitySplit, mu_s: float) -> float:
    """
    Restitution coefficient e_B equivalent to the static Coulomb law.

    e_B = −1 + min(‖V⊥_B‖, μ_s‖V⊥_S‖)/‖V⊥_B‖

    Raises:
        UndefinedRatioError: If V⊥_B vanishes
    """
    norm_b = split.norm_ortho_B
    if split.is_negligible(norm_b):
        raise UndefinedRatioError()
    return -1.0 + min(norm_b, mu_s * split.norm_ortho_S) / norm_b


def right_velocity_formula(split: VelocitySplit, e_s: float, lam: float) -> Vector:
    """Right velocity parallel_B − e_S·V⊥_S + (1 − λ)·V⊥_B."""
    return split.parallel_B - e_s * split.ortho_S + (1.0 - lam) * split.ortho_B


def energy_balance(G: Matrix, split: VelocitySplit, e_s: float, lam: float) -> float:
    """
    Kinetic energy change of an impact from the split.

    ΔT = −(1 − e_S²)/2·‖V⊥_S‖² − (1 − (1 − λ)²)/2·‖V⊥_B‖²

    λ may reach 2 for double restitution; the balance is non-positive on
    the whole range [0, 2].
    """
    if not 0.0 <= e_s <= 1.0:
        raise ParameterError("e_S must lie in [0, 1]", parameter="e_S")
    if not 0.0 <= lam <= 2.0:
        raise ParameterError("lambda must lie in [0, 2]", parameter="lambda")
    norm_s = metric_norm(G, split.ortho_S)
    norm_b = metric_norm(G, split.ortho_B)
    return -0.5 * (1.0 - e_s**2) * norm_s**2 - 0.5 * (1.0 - (1.0 - lam) ** 2) * norm_b**2


def stick_residual(C: Matrix, qdot: Vector) -> float:
    """Euclidean norm of the contact-point velocity C·qdot."""
    return float(np.linalg.norm(C @ qdot))


def resolve_impact(
    metric: MassMetric,
    surface: ContactSurface,
    stick: StickConstraint,
    state: GeneralizedState,
    law: AnyLaw,
) -> ImpactOutcome:
    """
    Resolve a single-point impact.

    Args:
        metric: Mass metric
        surface: Contact surface, s > 0 admissible
        stick: Stick constraint of the contact point
        state: Pre-impact state on the surface
        law: Contact law

    Returns:
        ImpactOutcome: The resolved impact

    Raises:
        ContactError: If the state is off the surface or separating
        GrazingImpactError: If the velocity has no S-orthogonal part
    """
    started = time.perf_counter()
    q, qdot = state.q, state.qdot

    gap = surface.value(q)
    if abs(gap) > tolerances.contact * (1.0 + float(np.linalg.norm(q))):
        raise ContactError(data={"s": gap, "time": state.time})

    G = metric.at(q)
    grad = surface.regular_gradient(q)
    split = split_velocity(G, grad, stick.at(q), qdot)

    if split.is_negligible(split.norm_ortho_S):
        raise GrazingImpactError(data={"norm_ortho_S": split.norm_ortho_S, "time": state.time})
    if float(grad @ qdot) > 0.0:
        raise ContactError("Velocity separates from the surface", code="separating", data={"time": state.time})

    impulse, branch, lam = reactive_impulse(law, split)
    right = qdot + impulse

    energy_left = kinetic_energy(G, qdot)
    delta_energy = kinetic_energy(G, right) - energy_left
    if delta_energy > tolerances.energy * (1.0 + abs(energy_left)):
        raise EnergyBalanceError(data={"delta_energy": delta_energy, "law": law.variant})

    elapsed_ms = (time.perf_counter() - started) * 1000
    impacts_resolved.add(1, {"branch": branch.value, "law": law.variant})
    resolve_time.record(elapsed_ms, {"law": law.variant})
    logger.debug_with_props(
        "Impact resolved",
        {"branch": branch.value, "lambda": lam, "delta_energy": delta_energy, "time": state.time},
    )

    return ImpactOutcome(
        law=law.variant,
        left_velocity=frozen_vector(qdot),
        impulse=frozen_vector(impulse),
        right_velocity=frozen_vector(right),
        branch=branch,
        effective_tangential_factor=lam,
        delta_energy=delta_energy,
        split=split,
    )
