"""
Error handling module.

This module defines the exception hierarchy of the engine. Every error carries
a machine-readable code, a human-readable detail, a context dictionary and the
process exit code the command line maps it to.
"""
from typing import Any, Dict, Optional

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2


class ImpactError(Exception):
    """Base error for the engine."""

    exit_code: int = EXIT_NUMERICAL

    def __init__(
        self,
        detail: str = "Impact engine error",
        code: str = "impact_error",
        data: Optional[Dict[str, Any]] = None,
        exit_code: Optional[int] = None,
    ):
        """
        Initialize engine error.

        Args:
            detail: Error detail message
            code: Error code
            data: Additional context
            exit_code: Override of the class exit code
        """
        super().__init__(detail)
        self.detail = detail
        self.code = code
        self.data: Dict[str, Any] = data or {}
        if exit_code is not None:
            self.exit_code = exit_code

    def to_dict(self) -> Dict[str, Any]:
        """Serializable view of the error."""
        return {"error": type(self).__name__, "code": self.code, "detail": self.detail, "data": self.data}


class ContractViolationError(ImpactError):
    """Input shapes or dimensions do not match."""

    def __init__(self, detail: str = "Dimension mismatch", code: str = "contract_violation", **kwargs: Any):
        super().__init__(detail=detail, code=code, **kwargs)


class MetricError(ImpactError):
    """Mass metric is not symmetric positive definite."""

    def __init__(
        self,
        detail: str = "Mass metric is not symmetric positive definite",
        code: str = "metric_error",
        min_eigenvalue: Optional[float] = None,
        **kwargs: Any,
    ):
        data = kwargs.pop("data", {})
        if min_eigenvalue is not None:
            data["min_eigenvalue"] = min_eigenvalue
        super().__init__(detail=detail, code=code, data=data, **kwargs)


class DegenerateSurfaceError(ImpactError):
    """Contact surface gradient vanishes."""

    def __init__(self, detail: str = "Contact surface gradient is zero", code: str = "degenerate_surface", **kwargs: Any):
        super().__init__(detail=detail, code=code, **kwargs)


class RankError(ImpactError):
    """Linear system is numerically rank deficient."""

    def __init__(self, detail: str = "Numerically rank-deficient system", code: str = "rank_error", **kwargs: Any):
        super().__init__(detail=detail, code=code, **kwargs)


class DegenerateConstraintError(RankError):
    """Stick constraint rows fail the rank conditions."""

    def __init__(
        self,
        detail: str = "Stick constraint is rank deficient or not proper in the surface tangent",
        code: str = "degenerate_constraint",
        **kwargs: Any,
    ):
        super().__init__(detail=detail, code=code, **kwargs)


class ContactError(ImpactError):
    """State is not in impacting contact."""

    def __init__(self, detail: str = "State is not on the contact surface", code: str = "contact_error", **kwargs: Any):
        super().__init__(detail=detail, code=code, **kwargs)


class GrazingImpactError(ContactError):
    """Impact without a normal velocity component."""

    def __init__(
        self,
        detail: str = "Grazing contact: no velocity component orthogonal to the surface",
        code: str = "grazing_impact",
        **kwargs: Any,
    ):
        super().__init__(detail=detail, code=code, **kwargs)


class ConfigurationError(ImpactError):
    """Configuration outside the model's domain."""

    def __init__(self, detail: str = "Configuration outside the model domain", code: str = "configuration_error", **kwargs: Any):
        super().__init__(detail=detail, code=code, **kwargs)


class ParameterError(ImpactError):
    """Physical or numerical parameter outside its admissible range."""

    def __init__(
        self,
        detail: str = "Parameter outside its admissible range",
        code: str = "parameter_error",
        parameter: Optional[str] = None,
        **kwargs: Any,
    ):
        data = kwargs.pop("data", {})
        if parameter:
            data["parameter"] = parameter
        super().__init__(detail=detail, code=code, data=data, **kwargs)


class UndefinedRatioError(ImpactError):
    """Ratio with a vanishing denominator."""

    def __init__(self, detail: str = "Ratio undefined for a zero tangential component", code: str = "undefined_ratio", **kwargs: Any):
        super().__init__(detail=detail, code=code, **kwargs)


class EnergyBalanceError(ImpactError):
    """Impact outcome creates kinetic energy."""

    def __init__(self, detail: str = "Impact increased kinetic energy", code: str = "energy_balance", **kwargs: Any):
        super().__init__(detail=detail, code=code, **kwargs)


class ExpressionError(ImpactError):
    """Base error of the expression language."""

    exit_code = EXIT_USAGE

    def __init__(self, detail: str = "Expression error", code: str = "expression_error", **kwargs: Any):
        super().__init__(detail=detail, code=code, **kwargs)


class ExpressionSyntaxError(ExpressionError):
    """Expression text does not parse."""

    def __init__(
        self,
        detail: str = "Syntax error",
        code: str = "expression_syntax",
        column: Optional[int] = None,
        text: Optional[str] = None,
        **kwargs: Any,
    ):
        data = kwargs.pop("data", {})
        if column is not None:
            data["column"] = column
            detail = f"{detail} at column {column}"
        if text is not None:
            data["text"] = text
        self.column = column
        super().__init__(detail=detail, code=code, data=data, **kwargs)


class UnknownFunctionError(ExpressionSyntaxError):
    """Expression calls a function outside the supported set."""

    def __init__(self, detail: str = "Unknown function", code: str = "unknown_function", **kwargs: Any):
        super().__init__(detail=detail, code=code, **kwargs)


class EvaluationError(ExpressionError):
    """Expression cannot be evaluated in the given environment."""

    exit_code = EXIT_NUMERICAL

    def __init__(self, detail: str = "Expression evaluation failed", code: str = "evaluation_error", **kwargs: Any):
        super().__init__(detail=detail, code=code, **kwargs)


class DifferentiationError(ExpressionError):
    """Expression contains a construct without a supported derivative."""

    def __init__(self, detail: str = "Unsupported construct for differentiation", code: str = "differentiation_error", **kwargs: Any):
        super().__init__(detail=detail, code=code, **kwargs)


class ScenarioError(ImpactError):
    """Scenario file is malformed or inconsistent."""

    exit_code = EXIT_USAGE

    def __init__(
        self,
        detail: str = "Invalid scenario",
        code: str = "scenario_error",
        path: Optional[str] = None,
        **kwargs: Any,
    ):
        data = kwargs.pop("data", {})
        if path:
            data["path"] = path
        super().__init__(detail=detail, code=code, data=data, **kwargs)


class UnknownParameterError(ScenarioError):
    """Sweep parameter is not defined by the scenario."""

    def __init__(self, detail: str = "Unknown parameter", code: str = "unknown_parameter", parameter: Optional[str] = None, **kwargs: Any):
        data = kwargs.pop("data", {})
        if parameter:
            data["parameter"] = parameter
            detail = f"{detail}: {parameter}"
        super().__init__(detail=detail, code=code, data=data, **kwargs)


class UnknownModelError(ScenarioError):
    """Model name is not a builtin."""

    def __init__(self, detail: str = "Unknown model", code: str = "unknown_model", model: Optional[str] = None, **kwargs: Any):
        data = kwargs.pop("data", {})
        if model:
            data["model"] = model
            detail = f"{detail}: {model}"
        super().__init__(detail=detail, code=code, data=data, **kwargs)


class SimulationError(ImpactError):
    """Failure during a simulation run, with event context."""

    def __init__(
        self,
        detail: str = "Simulation failed",
        code: str = "simulation_error",
        time: Optional[float] = None,
        event_index: Optional[int] = None,
        cause: Optional[ImpactError] = None,
        **kwargs: Any,
    ):
        data = kwargs.pop("data", {})
        if time is not None:
            data["time"] = time
        if event_index is not None:
            data["event_index"] = event_index
        if cause is not None:
            data["cause"] = cause.to_dict()
            detail = f"{detail}: {cause.detail}"
            kwargs.setdefault("exit_code", cause.exit_code)
        super().__init__(detail=detail, code=code, data=data, **kwargs)


class OutputError(ImpactError):
    """Report could not be written."""

    exit_code = EXIT_USAGE

    def __init__(self, detail: str = "Cannot write output", code: str = "output_error", **kwargs: Any):
        super().__init__(detail=detail, code=code, **kwargs)
