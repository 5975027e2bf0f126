"""
Numerical tolerance configuration.

This module provides the tolerances used by projections, solvers,
impact detection and diagnostics.
"""
import os
from typing import Any, Dict, Optional

from pydantic import BaseModel, Field


class ToleranceConfig(BaseModel):
    """Numerical tolerances."""

    zero_vector: float = Field(
        1e-12, gt=0, description="Relative threshold for zero vectors, scaled by 1 + |qdot|_G"
    )
    pivot_ratio: float = Field(
        1e-12, gt=0, description="Smallest/largest Cholesky pivot ratio before rank failure"
    )
    contact: float = Field(
        1e-8, gt=0, description="On-surface threshold, scaled by 1 + |q|"
    )
    detection_time: float = Field(
        1e-12, gt=0, description="Bisection time tolerance relative to the step"
    )
    separation_nudge: float = Field(
        1e-9, gt=0, description="Post-impact nudge along the outgoing flight, relative to the step"
    )
    gradient_check: float = Field(
        1e-6, gt=0, description="Relative tolerance of finite-difference gradient checks"
    )
    symmetry: float = Field(1e-10, gt=0, description="Relative metric symmetry tolerance")
    energy: float = Field(1e-12, gt=0, description="Slack on the non-positive energy change")


# Create a singleton instance
tolerances = ToleranceConfig()


def configure_tolerances(config_dict: Optional[Dict[str, Any]] = None) -> ToleranceConfig:
    """
    Configure tolerances from a dictionary or environment variables.

    Values are applied to the shared ``tolerances`` instance in place so that
    modules holding a reference see the update.

    Args:
        config_dict: Dictionary with tolerance values

    Returns:
        ToleranceConfig: The updated shared instance
    """
    if config_dict is None:
        config_dict = {
            key[len("IMPACT_TOL_"):].lower(): value
            for key, value in os.environ.items()
            if key.startswith("IMPACT_TOL_")
        }

    if config_dict:
        updated = ToleranceConfig.model_validate(
            {**tolerances.model_dump(), **config_dict}
        )
        for name in ToleranceConfig.model_fields:
            setattr(tolerances, name, getattr(updated, name))

    return tolerances
