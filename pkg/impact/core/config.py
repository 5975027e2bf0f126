"""
Configuration module for the engine.

This module defines process-level settings using Pydantic Settings.
"""
from typing import Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Engine settings."""

    # Application settings
    APP_NAME: str = "rough-impact"
    ENVIRONMENT: str = "development"

    # Logging and telemetry
    LOG_LEVEL: str = "INFO"
    LOG_FORMAT: str = Field("text", description="Log output format: text or json")
    OTLP_ENDPOINT: Optional[str] = None

    # Sweep execution
    SWEEP_MAX_WORKERS: int = Field(4, ge=1, description="Concurrent runs in a sweep")

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore",
    )

    @field_validator("LOG_FORMAT", mode="after")
    def resolve_log_format(cls, v: str, info) -> str:
        """Force JSON logs outside development-like environments."""
        fmt = v.lower()
        if fmt not in ("text", "json"):
            raise ValueError("LOG_FORMAT must be 'text' or 'json'")
        if info.data.get("ENVIRONMENT") in ("production", "staging"):
            return "json"
        return fmt


# Create a global settings object
settings = Settings()
