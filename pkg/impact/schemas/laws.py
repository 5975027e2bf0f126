"""
Contact law schemas.

This module defines the five constitutive characterizations of a rough
unilateral constraint as a discriminated union keyed on ``variant``.
"""
from enum import Enum
from typing import Annotated, Literal, Union

from pydantic import Field, model_validator

from impact.schemas.base import FrozenSchema


class LawVariant(str, Enum):
    """Contact law variant enumeration."""

    IDEAL = "ideal"
    RESTITUTION = "restitution"
    DOUBLE_RESTITUTION = "double_restitution"
    COULOMB_STATIC = "coulomb_static"
    COULOMB_DYNAMIC = "coulomb_dynamic"


class IdealLaw(FrozenSchema):
    """Complete reflection of the orthogonal component."""

    variant: Literal["ideal"] = "ideal"

    @property
    def e_s(self) -> float:
        return 1.0


class RestitutionLaw(FrozenSchema):
    """Smooth non-ideal law with restitution coefficient e_S."""

    variant: Literal["restitution"] = "restitution"
    # e_S = 1 admitted for the elastic limit
    e_s: float = Field(alias="e_S", ge=0.0, le=1.0)


class DoubleRestitutionLaw(FrozenSchema):
    """Restitution in both the S-orthogonal and B-orthogonal directions."""

    variant: Literal["double_restitution"] = "double_restitution"
    e_s: float = Field(alias="e_S", ge=0.0, le=1.0)
    e_b: float = Field(alias="e_B", ge=0.0, lt=1.0)


class CoulombStaticLaw(FrozenSchema):
    """Breakable stick constraint with a single static friction coefficient."""

    variant: Literal["coulomb_static"] = "coulomb_static"
    e_s: float = Field(alias="e_S", ge=0.0, le=1.0)
    mu_s: float = Field(ge=0.0)


class CoulombDynamicLaw(FrozenSchema):
    """Breakable stick constraint with static and dynamic friction coefficients."""

    variant: Literal["coulomb_dynamic"] = "coulomb_dynamic"
    e_s: float = Field(alias="e_S", ge=0.0, le=1.0)
    mu_s: float = Field(ge=0.0)
    mu_d: float = Field(ge=0.0)

    @model_validator(mode="after")
    def check_coefficients(self) -> "CoulombDynamicLaw":
        """Dynamic friction may not exceed static friction."""
        if self.mu_d > self.mu_s:
            raise ValueError("mu_d must not exceed mu_s")
        return self


ContactLaw = Annotated[
    Union[IdealLaw, RestitutionLaw, DoubleRestitutionLaw, CoulombStaticLaw, CoulombDynamicLaw],
    Field(discriminator="variant"),
]

# Coefficient names a sweep may vary, per variant
LAW_COEFFICIENTS = {
    LawVariant.IDEAL.value: (),
    LawVariant.RESTITUTION.value: ("e_S",),
    LawVariant.DOUBLE_RESTITUTION.value: ("e_S", "e_B"),
    LawVariant.COULOMB_STATIC.value: ("e_S", "mu_s"),
    LawVariant.COULOMB_DYNAMIC.value: ("e_S", "mu_s", "mu_d"),
}
