from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np
import pytest

from opdiff.config import OpdiffConfig

FIXTURES_DIR = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES_DIR


def load_fixture(name: str) -> Any:
    with open(FIXTURES_DIR / name) as f:
        return json.load(f)


@pytest.fixture
def sweep_cases() -> list[dict[str, Any]]:
    cases: list[dict[str, Any]] = load_fixture("sweep.json")["cases"]
    return cases


@pytest.fixture
def grid() -> np.ndarray:
    return np.linspace(0.0, 1.0, 101)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def test_config(tmp_path: Path) -> OpdiffConfig:
    return OpdiffConfig(
        grid_points=101,
        norm_grid_points=501,
        output_dir=tmp_path / "out",
    )
