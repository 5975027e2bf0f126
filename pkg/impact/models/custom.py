"""
Custom models.

This module builds a ModelSpec from expression-language text: a metric
matrix, a surface function, optional hand-written surface gradient and stick
rows, all functions of the coordinates and the named parameters.
"""
from typing import Dict, List, Mapping, Optional, Sequence

import numpy as np

from impact.core.errors import ContractViolationError, ExpressionError
from impact.core.expressions import CompiledExpression, Expr, evaluate, free_variables
from impact.core.geometry import ContactSurface, MassMetric, StickConstraint, Vector
from impact.core.logging import get_logger
from impact.models.base import ModelSpec

logger = get_logger(__name__)


def _compile(text: str, allowed: frozenset, where: str) -> CompiledExpression:
    compiled = CompiledExpression.from_text(text)
    unknown = sorted(free_variables(compiled.tree) - allowed)
    if unknown:
        raise ExpressionError(
            f"{where} refers to undefined names: {', '.join(unknown)}",
            code="undefined_name",
            data={"expression": text, "names": unknown},
        )
    return compiled


class _Environment:
    """Evaluation environment binding parameters and coordinates."""

    def __init__(self, coordinates: Sequence[str], parameters: Mapping[str, float]):
        self.coordinates = tuple(coordinates)
        self.parameters = dict(parameters)

    def bind(self, q: Vector) -> Dict[str, float]:
        env = dict(self.parameters)
        env.update(zip(self.coordinates, (float(v) for v in q)))
        return env


def build_custom_model(
    coordinates: Sequence[str],
    parameters: Mapping[str, float],
    metric: Sequence[Sequence[str]],
    surface: str,
    stick: Sequence[Sequence[str]],
    surface_gradient: Optional[Sequence[str]] = None,
) -> ModelSpec:
    """
    Build a model from expression text.

    Args:
        coordinates: Coordinate names, in order
        parameters: Named constants usable in every expression
        metric: n×n matrix of expressions
        surface: Expression of s(q)
        stick: k×n matrix of expressions for C(q)
        surface_gradient: Optional hand-written gradient; derived symbolically otherwise

    Returns:
        ModelSpec: The custom model

    Raises:
        ContractViolationError: On inconsistent dimensions
        ExpressionError: On parse errors or undefined names
    """
    coords = tuple(coordinates)
    n = len(coords)
    if n < 2:
        raise ContractViolationError("A custom model needs at least two coordinates")
    overlap = set(coords) & set(parameters)
    if overlap:
        raise ContractViolationError(
            f"Names used both as coordinate and parameter: {', '.join(sorted(overlap))}"
        )
    allowed = frozenset(coords) | frozenset(parameters)
    env = _Environment(coords, parameters)

    if len(metric) != n or any(len(row) != n for row in metric):
        raise ContractViolationError(f"Metric must be a {n}x{n} matrix of expressions")
    metric_exprs = [
        [_compile(text, allowed, f"metric[{i}][{j}]") for j, text in enumerate(row)]
        for i, row in enumerate(metric)
    ]

    surface_expr = _compile(surface, allowed, "surface")
    gradient_trees: List[Expr]
    if surface_gradient is None:
        gradient_trees = [surface_expr.derivative(name) for name in coords]
    else:
        if len(surface_gradient) != n:
            raise ContractViolationError(f"Surface gradient must have {n} entries")
        gradient_trees = [
            _compile(text, allowed, f"surface_gradient[{i}]").tree
            for i, text in enumerate(surface_gradient)
        ]

    if not stick or any(len(row) != n for row in stick):
        raise ContractViolationError(f"Stick rows must each have {n} entries")
    stick_exprs = [
        [_compile(text, allowed, f"stick[{i}][{j}]") for j, text in enumerate(row)]
        for i, row in enumerate(stick)
    ]

    def metric_fn(q: Vector) -> np.ndarray:
        bound = env.bind(q)
        return np.array([[entry(bound) for entry in row] for row in metric_exprs])

    def value_fn(q: Vector) -> float:
        return surface_expr(env.bind(q))

    def gradient_fn(q: Vector) -> np.ndarray:
        bound = env.bind(q)
        return np.array([evaluate(tree, bound) for tree in gradient_trees])

    def rows_fn(q: Vector) -> np.ndarray:
        bound = env.bind(q)
        return np.array([[entry(bound) for entry in row] for row in stick_exprs])

    logger.debug_with_props(
        "Custom model built",
        {"coordinates": list(coords), "hand_written_gradient": surface_gradient is not None},
    )

    return ModelSpec(
        name="custom",
        coordinates=coords,
        parameters=dict(parameters),
        metric=MassMetric(dim=n, matrix_fn=metric_fn),
        surface=ContactSurface(dim=n, value_fn=value_fn, gradient_fn=gradient_fn),
        stick=StickConstraint(dim=n, rows_fn=rows_fn),
    )
