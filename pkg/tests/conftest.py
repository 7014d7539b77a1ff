from __future__ import annotations

import os
from pathlib import Path

import pytest

from potential_utils import settings as settings_module
from potential_utils.geometry import GroupGeometry, ProductGeometry
from potential_utils.settings import ENV_PREFIX, Settings

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(autouse=True)
def isolated_settings(monkeypatch, tmp_path: Path) -> Path:
    """Keep a developer's ``settings.toml`` and ``RPV_*`` variables out of the tests."""
    for key in list(os.environ):
        if key.startswith(ENV_PREFIX):
            monkeypatch.delenv(key, raising=False)
    path = tmp_path / "settings.toml"
    monkeypatch.setattr(settings_module, "SETTINGS_FILE", path)
    return path


@pytest.fixture
def line() -> GroupGeometry:
    return GroupGeometry.euclidean(1)


@pytest.fixture
def plane() -> GroupGeometry:
    return GroupGeometry.euclidean(2)


@pytest.fixture
def line_pair(line) -> ProductGeometry:
    return ProductGeometry(first=line, second=line)


@pytest.fixture
def coarse() -> Settings:
    """Smaller grids for tests that only need a few digits."""
    return Settings(scan_points=120, scan_points_2d=40, cells_per_decade=8, ascent_budget=200)
