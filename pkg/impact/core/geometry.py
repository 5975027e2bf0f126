"""
Kinetic geometry module.

This module holds the configuration-space data model (mass metric, contact
surface, stick constraint, generalized state) and the metric projections that
split a left velocity relative to the contact surface S and the instantaneous
kinetic constraint B.

All inner products, norms and orthogonality are taken in the kinetic metric
G(q). Constraints are scleronomic, so the rest frame is the trivial one and a
velocity is represented by its spatial components ``qdot``.
"""
import warnings
from dataclasses import dataclass, replace
from typing import Callable, Optional, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import linalg

from impact.core.errors import (
    ContractViolationError,
    DegenerateConstraintError,
    DegenerateSurfaceError,
    MetricError,
    RankError,
)
from impact.core.tolerances import tolerances

Vector = NDArray[np.float64]
Matrix = NDArray[np.float64]
MatrixFn = Callable[[Vector], ArrayLike]
ScalarFn = Callable[[Vector], float]
VectorFn = Callable[[Vector], ArrayLike]


def as_vector(values: ArrayLike, name: str = "vector", dim: Optional[int] = None) -> Vector:
    """
    Convert input to a finite one-dimensional float array.

    Args:
        values: Array-like input
        name: Name used in error messages
        dim: Required length, if any

    Returns:
        Vector: Float array

    Raises:
        ContractViolationError: On wrong shape, length or non-finite entries
    """
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise ContractViolationError(f"{name} must be one-dimensional", data={"shape": list(arr.shape)})
    if dim is not None and arr.shape[0] != dim:
        raise ContractViolationError(
            f"{name} has length {arr.shape[0]}, expected {dim}",
            data={"length": arr.shape[0], "dim": dim},
        )
    if not np.all(np.isfinite(arr)):
        raise ContractViolationError(f"{name} contains non-finite values")
    return arr


def frozen_vector(values: ArrayLike) -> Vector:
    arr = np.array(values, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


def validate_metric(G: Matrix) -> float:
    """
    Check that a matrix is symmetric positive definite.

    Args:
        G: Square matrix

    Returns:
        float: Smallest eigenvalue

    Raises:
        MetricError: If G is asymmetric or not positive definite
    """
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise MetricError("Mass metric must be a square matrix", data={"shape": list(G.shape)})
    if not np.all(np.isfinite(G)):
        raise MetricError("Mass metric contains non-finite entries")
    scale = max(1.0, float(np.max(np.abs(G))))
    asymmetry = float(np.max(np.abs(G - G.T)))
    if asymmetry > tolerances.symmetry * scale:
        raise MetricError("Mass metric is not symmetric", data={"asymmetry": asymmetry})
    min_eig = float(np.linalg.eigvalsh(G).min())
    if min_eig <= 0.0:
        raise MetricError(
            f"Mass metric is not positive definite (smallest eigenvalue {min_eig:.6g} is "
            f"{'zero' if min_eig == 0.0 else 'negative'})",
            min_eigenvalue=min_eig,
        )
    return min_eig


@dataclass(frozen=True)
class MassMetric:
    """Symmetric positive definite mass matrix G(q)."""

    dim: int
    matrix_fn: MatrixFn
    is_constant: bool = False

    @classmethod
    def constant(cls, matrix: ArrayLike) -> "MassMetric":
        """Configuration-independent metric, validated at construction."""
        G = np.array(matrix, dtype=float)
        validate_metric(G)
        G.setflags(write=False)
        return cls(dim=G.shape[0], matrix_fn=lambda q: G, is_constant=True)

    @classmethod
    def diagonal(cls, *entries: float) -> "MassMetric":
        """Constant diagonal metric."""
        return cls.constant(np.diag(np.asarray(entries, dtype=float)))

    def at(self, q: ArrayLike) -> Matrix:
        """
        Evaluate and validate the metric at a configuration.

        Args:
            q: Configuration vector

        Returns:
            Matrix: G(q)
        """
        q = as_vector(q, "q", self.dim)
        G = np.asarray(self.matrix_fn(q), dtype=float)
        if G.shape != (self.dim, self.dim):
            raise ContractViolationError(
                f"Mass metric has shape {G.shape}, expected {(self.dim, self.dim)}"
            )
        if not self.is_constant:
            validate_metric(G)
        return G


@dataclass(frozen=True)
class ContactSurface:
    """Unilateral contact surface s(q) = 0, admissible where s(q) > 0."""

    dim: int
    value_fn: ScalarFn
    gradient_fn: VectorFn

    def value(self, q: ArrayLike) -> float:
        """Surface function s(q)."""
        return float(self.value_fn(as_vector(q, "q", self.dim)))

    def gradient(self, q: ArrayLike) -> Vector:
        """Row gradient of s at q."""
        return as_vector(self.gradient_fn(as_vector(q, "q", self.dim)), "gradient", self.dim)

    def regular_gradient(self, q: ArrayLike) -> Vector:
        """
        Gradient of s at q, required to be nonzero.

        Raises:
            DegenerateSurfaceError: If the gradient vanishes
        """
        grad = self.gradient(q)
        if float(np.linalg.norm(grad)) <= tolerances.zero_vector:
            raise DegenerateSurfaceError(data={"q": np.asarray(q, dtype=float).tolist()})
        return grad


@dataclass(frozen=True)
class StickConstraint:
    """Instantaneous kinetic constraint C(q)·qdot = 0 (contact point at rest)."""

    dim: int
    rows_fn: MatrixFn

    def at(self, q: ArrayLike) -> Matrix:
        """
        Evaluate the constraint rows at a configuration.

        Returns:
            Matrix: k×n matrix with 1 <= k <= n-1
        """
        C = np.atleast_2d(np.asarray(self.rows_fn(as_vector(q, "q", self.dim)), dtype=float))
        if C.ndim != 2 or C.shape[1] != self.dim:
            raise ContractViolationError(
                f"Stick rows have shape {C.shape}, expected (k, {self.dim})"
            )
        if not 1 <= C.shape[0] <= self.dim - 1:
            raise DegenerateConstraintError(
                f"Stick constraint needs between 1 and {self.dim - 1} rows, got {C.shape[0]}"
            )
        return C


@dataclass(frozen=True)
class GeneralizedState:
    """Time, generalized coordinates and generalized velocities."""

    time: float
    q: Vector
    qdot: Vector

    def __post_init__(self) -> None:
        q = as_vector(self.q, "q")
        qdot = as_vector(self.qdot, "qdot", q.shape[0])
        object.__setattr__(self, "time", float(self.time))
        object.__setattr__(self, "q", frozen_vector(q))
        object.__setattr__(self, "qdot", frozen_vector(qdot))

    @property
    def dim(self) -> int:
        return int(self.q.shape[0])

    def evolve(self, **changes: Union[float, ArrayLike]) -> "GeneralizedState":
        """Copy with some fields replaced."""
        return replace(self, **changes)


@dataclass(frozen=True)
class VelocitySplit:
    """Metric-orthogonal decomposition qdot = parallel_B + ortho_B + ortho_S."""

    parallel_B: Vector
    ortho_B: Vector
    ortho_S: Vector
    norm_ortho_B: float
    norm_ortho_S: float
    norm_total: float

    @property
    def tangential(self) -> Vector:
        """Part of the velocity tangent to S."""
        return self.parallel_B + self.ortho_B

    @property
    def velocity(self) -> Vector:
        """Reconstructed left velocity."""
        return self.parallel_B + self.ortho_B + self.ortho_S

    def is_negligible(self, norm: float) -> bool:
        """Scale-aware zero test on a metric norm."""
        return norm <= tolerances.zero_vector * (1.0 + self.norm_total)


def _check_square(G: Matrix, n: int) -> None:
    if G.shape != (n, n):
        raise ContractViolationError(f"Metric has shape {G.shape}, expected {(n, n)}")


def metric_inner(G: ArrayLike, u: ArrayLike, v: ArrayLike) -> float:
    """
    Metric inner product uᵀ G v.

    Args:
        G: Mass matrix at the current configuration
        u: First vector
        v: Second vector

    Returns:
        float: The inner product
    """
    G = np.asarray(G, dtype=float)
    u = as_vector(u, "u")
    v = as_vector(v, "v", u.shape[0])
    _check_square(G, u.shape[0])
    return float(u @ G @ v)


def metric_norm(G: ArrayLike, v: ArrayLike) -> float:
    """Kinetic-metric norm √(vᵀGv)."""
    return float(np.sqrt(max(metric_inner(G, v, v), 0.0)))


def kinetic_energy(G: ArrayLike, qdot: ArrayLike) -> float:
    """Kinetic energy ½ qdotᵀ G qdot."""
    return 0.5 * metric_inner(G, qdot, qdot)


def solve_spd(M: ArrayLike, rhs: ArrayLike, what: str = "system") -> NDArray[np.float64]:
    """
    Solve a symmetric positive definite system by Cholesky factorization.

    Fails when the factorization breaks down or the smallest squared pivot is
    below ``tolerances.pivot_ratio`` times the largest.

    Args:
        M: Symmetric positive definite matrix
        rhs: Right-hand side (vector or matrix)
        what: Name of the system for error messages

    Returns:
        Solution array

    Raises:
        RankError: On numerical rank deficiency
    """
    M = np.asarray(M, dtype=float)
    M = 0.5 * (M + M.T)
    try:
        factor, lower = linalg.cho_factor(M, lower=True)
    except linalg.LinAlgError as e:
        raise RankError(f"Cholesky factorization of the {what} failed: {e}")
    pivots = np.diag(factor) ** 2
    if pivots.min() <= tolerances.pivot_ratio * pivots.max():
        raise RankError(
            f"The {what} is numerically rank deficient",
            data={"pivot_ratio": float(pivots.min() / pivots.max())},
        )
    return linalg.cho_solve((factor, lower), np.asarray(rhs, dtype=float))


def metric_normal_component(G: Matrix, rows: Matrix, v: Vector) -> Vector:
    """
    Metric-orthogonal projection of v onto the range of G⁻¹Aᵀ.

    Computes G⁻¹Aᵀ (A G⁻¹ Aᵀ)⁻¹ A v, the component of v metric-orthogonal to
    ker(A).

    Args:
        G: Symmetric positive definite metric
        rows: Constraint rows A
        v: Vector to project

    Returns:
        Vector: The projected component
    """
    Ginv_At = solve_spd(G, rows.T, "mass metric")
    gram = rows @ Ginv_At
    coeff = solve_spd(gram, rows @ v, "constraint Gram matrix")
    return Ginv_At @ coeff


def check_stick_rank(grad: Vector, C: Matrix) -> None:
    """
    Verify the rank conditions of a stick constraint.

    C must have full row rank k, and ∇s stacked over C must have rank k+1.

    Raises:
        DegenerateConstraintError: If either condition fails
    """
    k = C.shape[0]
    rank_c = int(np.linalg.matrix_rank(C))
    rank_stack = int(np.linalg.matrix_rank(np.vstack([grad, C])))
    if rank_c != k or rank_stack != k + 1:
        raise DegenerateConstraintError(
            data={"rows": k, "rank_stick": rank_c, "rank_with_surface": rank_stack}
        )


def _ortho_S(G: Matrix, grad: Vector, qdot: Vector) -> Vector:
    return metric_normal_component(G, grad[np.newaxis, :], qdot)


def _ortho_B(G: Matrix, grad: Vector, C: Matrix, tangential: Vector) -> Vector:
    check_stick_rank(grad, C)
    # Orthonormal (Euclidean) basis of the tangent space ker(∇s)
    Z = linalg.null_space(grad[np.newaxis, :])
    G_z = Z.T @ G @ Z
    C_z = C @ Z
    y = Z.T @ tangential
    return Z @ metric_normal_component(G_z, C_z, y)


def _evaluate(
    metric: MassMetric, surface: ContactSurface, state: GeneralizedState
) -> Tuple[Matrix, Vector]:
    if state.dim != metric.dim or surface.dim != metric.dim:
        raise ContractViolationError(
            "State, metric and surface dimensions differ",
            data={"state": state.dim, "metric": metric.dim, "surface": surface.dim},
        )
    return metric.at(state.q), surface.regular_gradient(state.q)


def project_ortho_S(metric: MassMetric, surface: ContactSurface, state: GeneralizedState) -> Vector:
    """
    Absolute orthogonal component V⊥_S of the velocity.

    Returns G⁻¹∇sᵀ (∇s G⁻¹ ∇sᵀ)⁻¹ (∇s·qdot), the metric-orthogonal projection
    of qdot onto the metric normal line of S.
    """
    G, grad = _evaluate(metric, surface, state)
    return _ortho_S(G, grad, state.qdot)


def project_parallel_S(metric: MassMetric, surface: ContactSurface, state: GeneralizedState) -> Vector:
    """Part of qdot tangent to S: qdot − V⊥_S."""
    return state.qdot - project_ortho_S(metric, surface, state)


def project_ortho_B(
    metric: MassMetric,
    surface: ContactSurface,
    stick: StickConstraint,
    state: GeneralizedState,
) -> Vector:
    """
    Component V⊥_B of the velocity, tangent to S and metric-orthogonal to B.

    The S-tangential part of qdot is projected, inside the tangent space of S,
    onto the metric-orthogonal complement of ker(C) ∩ ker(∇s).
    """
    G, grad = _evaluate(metric, surface, state)
    tangential = state.qdot - _ortho_S(G, grad, state.qdot)
    return _ortho_B(G, grad, stick.at(state.q), tangential)


def split_velocity(G: Matrix, grad: Vector, C: Matrix, qdot: Vector) -> VelocitySplit:
    """
    Triple split of a velocity from already-evaluated geometry.

    Args:
        G: Metric at the impact configuration
        grad: Surface gradient at the impact configuration
        C: Stick rows at the impact configuration
        qdot: Left velocity

    Returns:
        VelocitySplit: The decomposition with its metric norms
    """
    ortho_S = _ortho_S(G, grad, qdot)
    ortho_B = _ortho_B(G, grad, C, qdot - ortho_S)
    parallel_B = qdot - ortho_B - ortho_S
    return VelocitySplit(
        parallel_B=frozen_vector(parallel_B),
        ortho_B=frozen_vector(ortho_B),
        ortho_S=frozen_vector(ortho_S),
        norm_ortho_B=metric_norm(G, ortho_B),
        norm_ortho_S=metric_norm(G, ortho_S),
        norm_total=metric_norm(G, qdot),
    )


def triple_split(
    metric: MassMetric,
    surface: ContactSurface,
    stick: StickConstraint,
    state: GeneralizedState,
) -> VelocitySplit:
    """
    Split a left velocity as parallel_B + V⊥_B + V⊥_S.

    The three parts are mutually orthogonal in the kinetic metric.
    """
    G, grad = _evaluate(metric, surface, state)
    return split_velocity(G, grad, stick.at(state.q), state.qdot)


def project_parallel_B(
    metric: MassMetric,
    surface: ContactSurface,
    stick: StickConstraint,
    state: GeneralizedState,
) -> Vector:
    """Part of qdot lying in B."""
    return triple_split(metric, surface, stick, state).parallel_B


def projection_oracle(G: ArrayLike, rows: ArrayLike, v: ArrayLike) -> Vector:
    """
    Brute-force metric projection onto a constraint kernel.

    Returns argmin_w (v−w)ᵀG(v−w) subject to rows·w = 0, from the KKT system

        [G  Aᵀ] [w]   [Gv]
        [A  0 ] [λ] = [0 ]

    Args:
        G: Symmetric positive definite metric
        rows: m×n constraint matrix (m may be zero)
        v: Vector to project

    Returns:
        Vector: The minimizer w

    Raises:
        RankError: If the rows are rank deficient or the KKT system is singular
    """
    v = as_vector(v, "v")
    n = v.shape[0]
    G = np.asarray(G, dtype=float)
    _check_square(G, n)
    A = np.asarray(rows, dtype=float).reshape(-1, n)
    m = A.shape[0]
    if m == 0:
        return v.copy()
    if int(np.linalg.matrix_rank(A)) < m:
        raise RankError("Constraint rows are rank deficient", data={"rows": m})

    kkt = np.block([[G, A.T], [A, np.zeros((m, m))]])
    rhs = np.concatenate([G @ v, np.zeros(m)])
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("error", linalg.LinAlgWarning)
            solution = linalg.solve(kkt, rhs, assume_a="sym")
    except (linalg.LinAlgError, linalg.LinAlgWarning) as e:
        raise RankError(f"Singular KKT system: {e}")
    return solution[:n]


def check_gradient(
    surface: ContactSurface, q: ArrayLike, step_scale: float = 1e-6
) -> float:
    """
    Compare the surface gradient with central finite differences.

    Uses the step ``step_scale·(1+|q_i|)`` per coordinate.

    Args:
        surface: Contact surface
        q: Configuration
        step_scale: Relative finite-difference step

    Returns:
        float: Maximum deviation relative to max(1, |fd|∞)
    """
    q = as_vector(q, "q", surface.dim)
    analytic = surface.gradient(q)
    fd = np.empty_like(q)
    for i in range(q.shape[0]):
        h = step_scale * (1.0 + abs(q[i]))
        forward, backward = q.copy(), q.copy()
        forward[i] += h
        backward[i] -= h
        fd[i] = (surface.value(forward) - surface.value(backward)) / (2.0 * h)
    scale = max(1.0, float(np.max(np.abs(fd))))
    return float(np.max(np.abs(analytic - fd)) / scale)


