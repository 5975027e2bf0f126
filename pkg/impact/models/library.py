"""
Builtin model library.

This module builds the point, disk and rod models and provides their
closed-form projections and right velocities, which serve as independent
oracles for the generic projectors and resolver.

All three move in a vertical half-plane above the horizontal line y = 0 with
gravity along −y. The disk and rod carry the orientation θ as a third
coordinate and the moment of inertia A about the centre of mass.
"""
import math
from typing import Callable, Dict, Optional, Tuple

import numpy as np
from numpy.typing import ArrayLike

from impact.core.errors import ConfigurationError, ParameterError, UnknownModelError
from impact.core.geometry import (
    ContactSurface,
    GeneralizedState,
    MassMetric,
    StickConstraint,
    Vector,
    VelocitySplit,
    as_vector,
    frozen_vector,
    metric_norm,
)
from impact.core.laws import Branch
from impact.models.base import ModelSpec, require_positive


def _parameters(g: Optional[float], **values: float) -> Dict[str, float]:
    params = {name: float(value) for name, value in values.items()}
    if g is not None:
        if not math.isfinite(g) or g < 0.0:
            raise ParameterError(f"Parameter g must be non-negative, got {g!r}", parameter="g")
        params["g"] = float(g)
    return params


def build_point(m: float, g: Optional[float] = None) -> ModelSpec:
    """
    Material point above a rough horizontal line.

    Coordinates (x, y), G = diag(m, m), s = y, stick row ẋ = 0.
    """
    require_positive(m=m)
    return ModelSpec(
        name="point",
        coordinates=("x", "y"),
        parameters=_parameters(g, m=m),
        metric=MassMetric.diagonal(m, m),
        surface=ContactSurface(dim=2, value_fn=lambda q: q[1], gradient_fn=lambda q: (0.0, 1.0)),
        stick=StickConstraint(dim=2, rows_fn=lambda q: [[1.0, 0.0]]),
        builtin=True,
        gravity_axis=1,
    )


def build_disk(m: float, R: float, A: float, g: Optional[float] = None) -> ModelSpec:
    """
    Disk of radius R rolling without slipping when stuck.

    Coordinates (x, y, θ), G = diag(m, m, A), s = y − R, stick row ẋ − Rθ̇ = 0.
    """
    require_positive(m=m, R=R, A=A)
    return ModelSpec(
        name="disk",
        coordinates=("x", "y", "theta"),
        parameters=_parameters(g, m=m, R=R, A=A),
        metric=MassMetric.diagonal(m, m, A),
        surface=ContactSurface(
            dim=3, value_fn=lambda q: q[1] - R, gradient_fn=lambda q: (0.0, 1.0, 0.0)
        ),
        stick=StickConstraint(dim=3, rows_fn=lambda q: [[1.0, 0.0, -R]]),
        builtin=True,
        gravity_axis=1,
    )


def _rod_domain(q: Vector) -> None:
    theta = float(q[2])
    if not 0.0 < theta < math.pi:
        raise ConfigurationError(
            f"Rod orientation {theta!r} outside (0, pi)", data={"theta": theta}
        )


def build_rod(m: float, L: float, A: float, g: Optional[float] = None) -> ModelSpec:
    """
    Rod of length 2L touching the line with one end.

    Coordinates (x, y, θ) of the centre, G = diag(m, m, A), s = y − L·sinθ,
    stick row ẋ − Lθ̇·sinθ = 0. Only θ ∈ (0, π) is admissible.
    """
    require_positive(m=m, L=L, A=A)
    return ModelSpec(
        name="rod",
        coordinates=("x", "y", "theta"),
        parameters=_parameters(g, m=m, L=L, A=A),
        metric=MassMetric.diagonal(m, m, A),
        surface=ContactSurface(
            dim=3,
            value_fn=lambda q: q[1] - L * math.sin(q[2]),
            gradient_fn=lambda q: (0.0, 1.0, -L * math.cos(q[2])),
        ),
        stick=StickConstraint(dim=3, rows_fn=lambda q: [[1.0, 0.0, -L * math.sin(q[2])]]),
        domain_check=_rod_domain,
        builtin=True,
        gravity_axis=1,
    )


BUILTIN_MODELS: Dict[str, Callable[..., ModelSpec]] = {
    "point": build_point,
    "disk": build_disk,
    "rod": build_rod,
}

BUILTIN_COORDINATES: Dict[str, Tuple[str, ...]] = {
    "point": ("x", "y"),
    "disk": ("x", "y", "theta"),
    "rod": ("x", "y", "theta"),
}

BUILTIN_PARAMETERS: Dict[str, Tuple[str, ...]] = {
    "point": ("m",),
    "disk": ("m", "R", "A"),
    "rod": ("m", "L", "A"),
}


def build_builtin(name: str, parameters: Dict[str, float]) -> ModelSpec:
    """
    Build a builtin model from a parameter map.

    Raises:
        UnknownModelError: If the name is not a builtin
        ParameterError: If a required parameter is missing or out of range
    """
    if name not in BUILTIN_MODELS:
        raise UnknownModelError(model=name)
    allowed = BUILTIN_PARAMETERS[name] + ("g",)
    for key in parameters:
        if key not in allowed:
            raise ParameterError(f"Model {name} has no parameter {key!r}", parameter=key)
    for key in BUILTIN_PARAMETERS[name]:
        if key not in parameters:
            raise ParameterError(f"Model {name} requires parameter {key!r}", parameter=key)
    return BUILTIN_MODELS[name](**parameters)


def _make_split(G: np.ndarray, qdot: Vector, parallel_B: ArrayLike, ortho_S: ArrayLike) -> VelocitySplit:
    parallel_B = np.asarray(parallel_B, dtype=float)
    ortho_S = np.asarray(ortho_S, dtype=float)
    ortho_B = qdot - parallel_B - ortho_S
    return VelocitySplit(
        parallel_B=frozen_vector(parallel_B),
        ortho_B=frozen_vector(ortho_B),
        ortho_S=frozen_vector(ortho_S),
        norm_ortho_B=metric_norm(G, ortho_B),
        norm_ortho_S=metric_norm(G, ortho_S),
        norm_total=metric_norm(G, qdot),
    )


def analytic_split_oracle(model: ModelSpec, state: GeneralizedState) -> VelocitySplit:
    """
    Closed-form triple split of a builtin model.

    Args:
        model: Builtin point, disk or rod
        state: Impact state

    Returns:
        VelocitySplit: Split computed from hand-derived formulas

    Raises:
        UnknownModelError: For non-builtin models
    """
    if not model.builtin or model.name not in BUILTIN_MODELS:
        raise UnknownModelError("No closed-form split for model", model=model.name)

    p = model.parameters
    qdot = as_vector(state.qdot, "qdot", model.dim)
    G = model.metric.at(state.q)

    if model.name == "point":
        xd, yd = qdot
        return _make_split(G, qdot, parallel_B=(0.0, 0.0), ortho_S=(0.0, yd))

    if model.name == "disk":
        m, R, A = p["m"], p["R"], p["A"]
        xd, yd, td = qdot
        k = (m * R * xd + A * td) / (m * R**2 + A)
        return _make_split(G, qdot, parallel_B=(R * k, 0.0, k), ortho_S=(0.0, yd, 0.0))

    model.check_configuration(state.q)
    m, L, A = p["m"], p["L"], p["A"]
    xd, yd, td = qdot
    s, c = math.sin(state.q[2]), math.cos(state.q[2])
    k = (m * L * xd * s + m * L * yd * c + A * td) / (m * L**2 + A)
    normal = (yd - L * td * c) / (m * L**2 * c**2 + A)
    return _make_split(
        G,
        qdot,
        parallel_B=(L * s * k, L * c * k, k),
        ortho_S=(0.0, A * normal, -m * L * c * normal),
    )


def _slip_factor(mu: Optional[float], mu_s: float) -> float:
    return mu_s if mu is None else mu


def point_right_velocity(
    qdot: ArrayLike, e_s: float, mu_s: float, mu_d: Optional[float] = None
) -> Tuple[Vector, Branch]:
    """
    Right velocity of the material point under a Coulomb law.

    Sticks when |ẋ| ≤ μ_s|ẏ|, otherwise keeps ẋ·(1 − μ|ẏ|/|ẋ|).
    """
    xd, yd = as_vector(qdot, "qdot", 2)
    if abs(xd) <= mu_s * abs(yd):
        return np.array([0.0, -e_s * yd]), Branch.STICK
    mu = _slip_factor(mu_d, mu_s)
    return np.array([xd - mu * abs(yd) * math.copysign(1.0, xd), -e_s * yd]), Branch.SLIP


def disk_right_velocity(
    m: float,
    R: float,
    A: float,
    qdot: ArrayLike,
    e_s: float,
    mu_s: float,
    mu_d: Optional[float] = None,
) -> Tuple[Vector, Branch]:
    """
    Right velocity of the disk under a Coulomb law.

    Args:
        m: Mass
        R: Radius
        A: Moment of inertia
        qdot: Left velocity (ẋ, ẏ, θ̇)
        e_s: Restitution coefficient
        mu_s: Static friction coefficient (branch test)
        mu_d: Dynamic friction coefficient (slip magnitude), defaults to mu_s

    Returns:
        Tuple containing:
        - Vector: right velocity
        - Branch: stick or slip
    """
    require_positive(m=m, R=R, A=A)
    xd, yd, td = as_vector(qdot, "qdot", 3)
    inertia = m * R**2 + A
    slip = xd - R * td
    weighted = abs(slip) * math.sqrt(A / inertia)

    if weighted <= mu_s * abs(yd):
        k = (m * R * xd + A * td) / inertia
        return np.array([R * k, -e_s * yd, k]), Branch.STICK

    ratio = _slip_factor(mu_d, mu_s) * abs(yd) / weighted
    return (
        np.array(
            [
                xd - ratio * A / inertia * slip,
                -e_s * yd,
                td + ratio * m * R / inertia * slip,
            ]
        ),
        Branch.SLIP,
    )


def rod_vertical_fall_ratio(m: float, L: float, A: float, theta: float) -> float:
    """
    Ratio ‖V⊥_B‖/‖V⊥_S‖ of a rod falling vertically without rotation.

    Equals mL²|sinθ·cosθ| / √(A(mL² + A)); it does not depend on ẏ_L.
    """
    require_positive(m=m, L=L, A=A)
    return m * L**2 * abs(math.sin(theta) * math.cos(theta)) / math.sqrt(A * (m * L**2 + A))


def rod_vertical_fall_branch(m: float, L: float, A: float, theta: float, mu_s: float) -> Branch:
    """Stick or slip for a vertical, non-rotating fall of the rod at angle θ."""
    if rod_vertical_fall_ratio(m, L, A, theta) <= mu_s:
        return Branch.STICK
    return Branch.SLIP


def rod_vertical_fall_right_velocity(
    m: float,
    L: float,
    A: float,
    theta: float,
    yd: float,
    e_s: float,
    mu_s: float,
    mu_d: Optional[float] = None,
) -> Tuple[Vector, Branch]:
    """
    Right velocity of the rod after a vertical fall (ẋ_L = θ̇_L = 0).

    Args:
        m: Mass
        L: Half length
        A: Moment of inertia about the centre
        theta: Impact angle in (0, π)
        yd: Vertical left velocity ẏ_L
        e_s: Restitution coefficient
        mu_s: Static friction coefficient
        mu_d: Dynamic friction coefficient, defaults to mu_s

    Returns:
        Tuple containing:
        - Vector: right velocity
        - Branch: stick or slip
    """
    s, c = math.sin(theta), math.cos(theta)
    mL2 = m * L**2
    full = mL2 + A
    projected = mL2 * c**2 + A

    branch = rod_vertical_fall_branch(m, L, A, theta, mu_s)
    if branch is Branch.STICK:
        right = np.array(
            [
                mL2 * s * c / full * yd,
                (mL2 * c**2 / full - e_s * A / projected) * yd,
                (m * L * c / full + e_s * m * L * c / projected) * yd,
            ]
        )
        return right, branch

    lam = _slip_factor(mu_d, mu_s) / rod_vertical_fall_ratio(m, L, A, theta)
    right = np.array(
        [
            lam * mL2 * s * c / full * yd,
            ((mL2 * c**2 - e_s * A) / projected - lam * mL2**2 * s**2 * c**2 / (full * projected)) * yd,
            m * L * c / projected * (1.0 + e_s - lam * mL2 * s**2 / full) * yd,
        ]
    )
    return right, branch


def rod_rebound_threshold(m: float, L: float, A: float, e_s: float) -> float:
    """
    Threshold on cos²θ below which a stuck vertical fall rebounds upwards.

    (A / 2mL²)·(√(1 + 4e_S(mL² + A)/A) − 1)
    """
    require_positive(m=m, L=L, A=A)
    if not 0.0 <= e_s <= 1.0:
        raise ParameterError("e_S must lie in [0, 1]", parameter="e_S")
    return A / (2.0 * m * L**2) * (math.sqrt(1.0 + 4.0 * e_s * (m * L**2 + A) / A) - 1.0)
