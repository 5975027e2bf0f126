"""
Event-driven simulator.

This module advances a model in free flight under a constant generalized
force, locates the instants where the contact surface is reached, applies
the contact law there and stops at the end time, at the impact limit, when
the motion settles onto the surface or when the configuration leaves the
model domain.
"""
import time as _time
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

import numpy as np
from numpy.typing import ArrayLike
from scipy import optimize

from impact.core.errors import ConfigurationError, GrazingImpactError, ImpactError, SimulationError
from impact.core.geometry import GeneralizedState, Vector, frozen_vector, kinetic_energy, solve_spd
from impact.core.laws import Branch, restitution_of
from impact.core.logging import get_logger
from impact.core.tolerances import tolerances
from impact.models.base import ModelSpec
from impact.services.scenario import ScenarioConfig

logger = get_logger(__name__)

# Subintervals searched for the earliest sign change of s within one step
DETECTION_SUBDIVISIONS = 8


class TerminationReason(str, Enum):
    """Why a simulation run stopped."""

    T_END = "t_end"
    MAX_IMPACTS = "max_impacts"
    SETTLED = "settled"
    DOMAIN_EXIT = "domain_exit"


@dataclass(frozen=True)
class ImpactEvent:
    """Velocity jump at an impact, or the marker ending a settled or domain-exit run."""

    index: int
    time: float
    q: Vector
    pre_qdot: Vector
    post_qdot: Vector
    branch: Branch
    impulse: Vector
    delta_energy: float
    total_energy_before: float
    total_energy_after: float

    @property
    def is_impact(self) -> bool:
        return self.branch not in (Branch.SETTLED, Branch.DOMAIN_EXIT)


@dataclass
class Trajectory:
    """Samples and events of a run, in time order."""

    samples: List[GeneralizedState] = field(default_factory=list)
    events: List[ImpactEvent] = field(default_factory=list)
    status: TerminationReason = TerminationReason.T_END

    @property
    def impacts(self) -> List[ImpactEvent]:
        return [event for event in self.events if event.is_impact]

    @property
    def final_state(self) -> GeneralizedState:
        return self.samples[-1]


def acceleration(model: ModelSpec, force: ArrayLike, q: ArrayLike) -> Vector:
    """Generalized acceleration G(q)⁻¹·force."""
    return solve_spd(model.metric.at(q), np.asarray(force, dtype=float), "mass metric")


def total_energy(model: ModelSpec, force: ArrayLike, state: GeneralizedState) -> float:
    """Kinetic energy plus the potential −force·q of the constant force."""
    G = model.metric.at(state.q)
    return kinetic_energy(G, state.qdot) - float(np.dot(force, state.q))


def integrate_free_flight(
    model: ModelSpec, force: ArrayLike, state: GeneralizedState, dt: float
) -> GeneralizedState:
    """
    Advance a state in free flight under q̈ = G(q)⁻¹·force.

    Constant metrics use the exact quadratic update; configuration-dependent
    metrics take one classical Runge-Kutta step of length dt.

    Args:
        model: Mechanical model
        force: Constant generalized force
        state: Initial state
        dt: Time step, non-negative

    Returns:
        GeneralizedState: State at time state.time + dt
    """
    if dt == 0.0:
        return state
    q, v = state.q, state.qdot

    if model.metric.is_constant:
        a = acceleration(model, force, q)
        return state.evolve(time=state.time + dt, q=q + v * dt + 0.5 * a * dt**2, qdot=v + a * dt)

    k1_q, k1_v = v, acceleration(model, force, q)
    k2_q, k2_v = v + 0.5 * dt * k1_v, acceleration(model, force, q + 0.5 * dt * k1_q)
    k3_q, k3_v = v + 0.5 * dt * k2_v, acceleration(model, force, q + 0.5 * dt * k2_q)
    k4_q, k4_v = v + dt * k3_v, acceleration(model, force, q + dt * k3_q)
    return state.evolve(
        time=state.time + dt,
        q=q + dt / 6.0 * (k1_q + 2.0 * k2_q + 2.0 * k3_q + k4_q),
        qdot=v + dt / 6.0 * (k1_v + 2.0 * k2_v + 2.0 * k3_v + k4_v),
    )


def detect_impact(
    model: ModelSpec,
    force: ArrayLike,
    state: GeneralizedState,
    next_state: GeneralizedState,
    dt: float,
) -> Optional[float]:
    """
    Find the earliest time in a step where s(q(t)) reaches zero from above.

    The step is divided into eight subintervals; the first one with s > 0 at
    its start and s ≤ 0 at its end is bisected on the re-integrated flight to
    a time tolerance of ``tolerances.detection_time``·dt.

    Args:
        model: Mechanical model
        force: Constant generalized force
        state: State at the start of the step
        next_state: Free-flight state at the end of the step
        dt: Step length

    Returns:
        Optional[float]: Absolute impact time, or None without a crossing
    """
    surface = model.surface

    def gap(tau: float) -> float:
        if tau == 0.0:
            return surface.value(state.q)
        if tau == dt:
            return surface.value(next_state.q)
        return surface.value(integrate_free_flight(model, force, state, tau).q)

    taus = [dt * k / DETECTION_SUBDIVISIONS for k in range(DETECTION_SUBDIVISIONS + 1)]
    taus[-1] = dt
    values = [gap(tau) for tau in taus]

    for (a, s_a), (b, s_b) in zip(zip(taus, values), zip(taus[1:], values[1:])):
        if s_a > 0.0 and s_b <= 0.0:
            if s_b == 0.0:
                root = b
            else:
                root = optimize.bisect(gap, a, b, xtol=tolerances.detection_time * dt)
            return state.time + root
    return None


def approaching_contact(model: ModelSpec, state: GeneralizedState) -> bool:
    """True when the state lies on the surface with a velocity pointing into it."""
    q = state.q
    if abs(model.surface.value(q)) > tolerances.contact * (1.0 + float(np.linalg.norm(q))):
        return False
    return float(model.surface.gradient(q) @ state.qdot) < 0.0


def in_domain(model: ModelSpec, q: ArrayLike) -> bool:
    """True when the model's coordinates are valid at q."""
    try:
        model.check_configuration(q)
    except ConfigurationError:
        return False
    return True


def domain_exit_offset(model: ModelSpec, force: ArrayLike, state: GeneralizedState, dt: float) -> float:
    """
    Last offset in [0, dt] whose free flight from state stays inside the domain.

    Bisects the in/out indicator to ``tolerances.detection_time``·dt. The
    start state is assumed valid and the end of the step invalid.
    """
    lo, hi = 0.0, dt
    while hi - lo > tolerances.detection_time * dt:
        mid = 0.5 * (lo + hi)
        if in_domain(model, integrate_free_flight(model, force, state, mid).q):
            lo = mid
        else:
            hi = mid
    return lo


def _separate(
    model: ModelSpec, force: ArrayLike, state: GeneralizedState, step: float
) -> Optional[GeneralizedState]:
    """Nudge a post-impact state along its flight until s > 0, if possible."""
    nudge = tolerances.separation_nudge * step
    while nudge < step:
        moved = integrate_free_flight(model, force, state, nudge)
        if model.surface.value(moved.q) > 0.0:
            return moved
        nudge *= 10.0
    return None


def _event(
    index: int,
    state: GeneralizedState,
    post_qdot: ArrayLike,
    branch: Branch,
    impulse: ArrayLike,
    model: ModelSpec,
    force: ArrayLike,
) -> ImpactEvent:
    post = state.evolve(qdot=post_qdot)
    before = total_energy(model, force, state)
    after = total_energy(model, force, post)
    G = model.metric.at(state.q)
    return ImpactEvent(
        index=index,
        time=state.time,
        q=state.q,
        pre_qdot=state.qdot,
        post_qdot=post.qdot,
        branch=branch,
        impulse=frozen_vector(impulse),
        delta_energy=kinetic_energy(G, post.qdot) - kinetic_energy(G, state.qdot),
        total_energy_before=before,
        total_energy_after=after,
    )


def run_simulation(config: ScenarioConfig) -> Trajectory:
    """
    Run an event-driven simulation.

    Args:
        config: Simulation configuration

    Returns:
        Trajectory: Samples, events and the termination reason

    Raises:
        SimulationError: When an impact cannot be resolved, with event context
    """
    model, force, law = config.model, config.force, config.law
    state = config.initial
    trajectory = Trajectory(samples=[state])
    impacts = 0
    started = _time.perf_counter()

    logger.info_with_props(
        "Simulation started",
        {"model": model.name, "law": law.variant, "t_end": config.t_end, "step": config.step},
    )

    def settle(at: GeneralizedState) -> None:
        trajectory.events.append(
            _event(len(trajectory.events), at, at.qdot, Branch.SETTLED, np.zeros(model.dim), model, force)
        )
        trajectory.status = TerminationReason.SETTLED
        logger.info_with_props("Motion settled", {"time": at.time, "impacts": impacts})

    def leave_domain(at: GeneralizedState) -> None:
        trajectory.events.append(
            _event(len(trajectory.events), at, at.qdot, Branch.DOMAIN_EXIT, np.zeros(model.dim), model, force)
        )
        trajectory.status = TerminationReason.DOMAIN_EXIT
        logger.warning_with_props(
            "Configuration left the model domain", {"time": at.time, "q": at.q.tolist(), "impacts": impacts}
        )

    # A scenario may start at the contact instant itself
    pending: Optional[GeneralizedState] = state if approaching_contact(model, state) else None

    while state.time < config.t_end:
        next_state: Optional[GeneralizedState] = None
        if pending is not None:
            pre, pending = pending, None
        else:
            remaining = config.t_end - state.time
            dt = min(config.step, remaining)
            next_state = integrate_free_flight(model, force, state, dt)
            if dt == remaining:
                next_state = next_state.evolve(time=config.t_end)

            leaving = not in_domain(model, next_state.q)
            if leaving:
                dt = domain_exit_offset(model, force, state, dt)
                next_state = integrate_free_flight(model, force, state, dt)

            t_hit = detect_impact(model, force, state, next_state, dt) if dt > 0.0 else None
            if t_hit is None:
                if next_state.time > state.time:
                    trajectory.samples.append(next_state)
                state = next_state
                if leaving:
                    leave_domain(state)
                    break
                continue

            pre = integrate_free_flight(model, force, state, t_hit - state.time)
            if pre.time > state.time:
                trajectory.samples.append(pre)

        try:
            split = model.split(pre)
            if split.norm_ortho_S < config.settle_speed:
                settle(pre)
                break
            outcome = model.resolve(pre, law)
        except GrazingImpactError:
            logger.warning_with_props("Grazing contact passed through", {"time": pre.time})
            if next_state is not None:
                state = next_state
                trajectory.samples.append(state)
            continue
        except ImpactError as e:
            raise SimulationError(time=pre.time, event_index=len(trajectory.events), cause=e)

        trajectory.events.append(
            _event(
                len(trajectory.events),
                pre,
                outcome.right_velocity,
                outcome.branch,
                outcome.impulse,
                model,
                force,
            )
        )
        impacts += 1

        outgoing = pre.evolve(qdot=outcome.right_velocity)
        separated = None
        if restitution_of(law) * split.norm_ortho_S >= config.settle_speed:
            separated = _separate(model, force, outgoing, config.step)
        if separated is not None:
            state = separated
            trajectory.samples.append(state)

        if impacts >= config.max_impacts:
            trajectory.status = TerminationReason.MAX_IMPACTS
            break
        if separated is None:
            settle(outgoing)
            break

    logger.info_with_props(
        "Simulation finished",
        {
            "status": trajectory.status.value,
            "impacts": impacts,
            "samples": len(trajectory.samples),
            "elapsed_ms": (_time.perf_counter() - started) * 1000,
        },
    )
    return trajectory
