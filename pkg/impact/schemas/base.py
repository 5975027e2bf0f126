"""
Base schemas.

This module defines base schemas shared by scenario files, laws and reports.
"""
from typing import List

from pydantic import BaseModel, ConfigDict


class BaseSchema(BaseModel):
    """Base schema model."""

    model_config = ConfigDict(
        populate_by_name=True,
        validate_assignment=True,
        extra="forbid",
    )


class FrozenSchema(BaseSchema):
    """Immutable schema model."""

    model_config = ConfigDict(frozen=True)


FloatList = List[float]
