"""
Test configuration and fixtures.
"""
import json
import logging
import math
from pathlib import Path
from typing import Any, Callable, Dict

import numpy as np
import pytest

from impact.core.tolerances import ToleranceConfig, tolerances
from impact.models.base import ModelSpec
from impact.models.library import build_disk, build_point, build_rod

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded random generator."""
    return np.random.default_rng(12345)


@pytest.fixture(autouse=True)
def reset_tolerances():
    """Restore the shared tolerances after each test."""
    saved = tolerances.model_dump()
    yield
    for name in ToleranceConfig.model_fields:
        setattr(tolerances, name, saved[name])


@pytest.fixture(autouse=True)
def restore_root_logging():
    """Undo handler changes made by setup_logging."""
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


@pytest.fixture
def point() -> ModelSpec:
    return build_point(m=1.0)


@pytest.fixture
def falling_point() -> ModelSpec:
    return build_point(m=1.0, g=10.0)


@pytest.fixture
def disk() -> ModelSpec:
    return build_disk(m=1.0, R=0.5, A=0.125)


@pytest.fixture
def rod() -> ModelSpec:
    return build_rod(m=1.0, L=1.0, A=1.0 / 3.0)


@pytest.fixture
def scenario_dir() -> Path:
    return SCENARIO_DIR


def point_document(**overrides: Any) -> Dict[str, Any]:
    """Scenario document of a unit-mass point, updated with overrides."""
    document: Dict[str, Any] = {
        "model": {"builtin": "point", "parameters": {"m": 1.0}},
        "law": {"variant": "coulomb_static", "e_S": 0.5, "mu_s": 0.5},
        "initial": {"t": 0.0, "q": [0.0, 0.0], "qdot": [1.0, -1.0]},
    }
    document.update(overrides)
    return document


def rod_document(theta: float = 1.0, **overrides: Any) -> Dict[str, Any]:
    """Scenario document of a rod touching the line at angle theta."""
    document: Dict[str, Any] = {
        "model": {"builtin": "rod", "parameters": {"m": 1.0, "L": 1.0, "A": 1.0 / 3.0}},
        "law": {"variant": "coulomb_static", "e_S": 0.5, "mu_s": 0.3},
        "initial": {"t": 0.0, "q": [0.0, math.sin(theta), theta], "qdot": [0.0, -1.0, 0.0]},
    }
    document.update(overrides)
    return document


@pytest.fixture
def write_scenario(tmp_path: Path) -> Callable[..., Path]:
    """Write a scenario document to a temporary file and return its path."""

    def write(document: Dict[str, Any], name: str = "scenario.json") -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return path

    return write
