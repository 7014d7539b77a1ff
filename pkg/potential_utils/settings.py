"""Numeric defaults and their configuration sources.

Precedence, lowest first: built-in defaults, ``settings.toml`` in the working
directory, ``RPV_*`` environment variables (``.env`` is loaded first), and
finally explicit overrides passed by the caller (the CLI flags).
"""

from __future__ import annotations

import logging
import os
from contextlib import contextmanager
from contextvars import ContextVar
from pathlib import Path
from typing import Any, Dict, Iterator, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

try:
    from dotenv import load_dotenv
except Exception:  # pragma: no cover - optional dependency

    def load_dotenv() -> None:
        return None


try:  # Python 3.11+
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - older Python
    import tomli as tomllib  # type: ignore

logger = logging.getLogger(__name__)

ENV_PREFIX = "RPV_"
SETTINGS_FILE = Path("settings.toml")


class Settings(BaseModel):
    """Grid, scan and optimizer parameters used across the package."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    t_min: float = Field(default=1e-6, gt=0)
    t_max: float = Field(default=1e6, gt=0)
    cells_per_decade: int = Field(default=16, ge=2)
    gauss_order: int = Field(default=8, ge=2, le=64)
    scan_points: int = Field(default=400, ge=16)
    scan_points_2d: int = Field(default=120, ge=8)
    grid_density: int = Field(
        default=256, ge=4, description="Output grid points per decade for operator profiles"
    )
    output_t_min: float = Field(default=1e-4, gt=0)
    output_t_max: float = Field(default=1e4, gt=0)
    ascent_cells: int = Field(default=64, ge=4)
    ascent_budget: int = Field(default=2000, ge=1)
    seed: int = Field(default=20240601, ge=0)
    jobs: int = Field(default=1, ge=1)
    verdict_tolerance: float = Field(default=0.02, gt=0)
    log_level: str = "INFO"

    @model_validator(mode="after")
    def _ordered_bounds(self) -> "Settings":
        if self.t_min >= self.t_max:
            raise ValueError("t_min must be smaller than t_max")
        if self.output_t_min >= self.output_t_max:
            raise ValueError("output_t_min must be smaller than output_t_max")
        return self


def _from_file(path: Path) -> Dict[str, Any]:
    if not path.exists():
        return {}
    try:
        with path.open("rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError:
        logger.warning("settings file %s is not valid TOML; ignoring it", path)
        return {}
    except OSError as err:
        logger.warning("settings file %s cannot be read (%s); ignoring it", path, err)
        return {}
    return {k: v for k, v in data.items() if k in Settings.model_fields}


def _from_env() -> Dict[str, Any]:
    values: Dict[str, Any] = {}
    for name in Settings.model_fields:
        raw = os.getenv(ENV_PREFIX + name.upper())
        if raw is not None:
            values[name] = raw
    return values


def load_settings(overrides: Dict[str, Any] | None = None) -> Settings:
    """Return settings merged from file, environment and ``overrides``.

    ``None`` values in ``overrides`` are ignored so argparse namespaces can be
    passed through without filtering.
    """
    load_dotenv()
    merged: Dict[str, Any] = {}
    merged.update(_from_file(SETTINGS_FILE))
    merged.update(_from_env())
    if overrides:
        merged.update({k: v for k, v in overrides.items() if v is not None})
    return Settings.model_validate(merged)


DEFAULT_SETTINGS = Settings()

_ACTIVE: ContextVar[Optional[Settings]] = ContextVar("active_settings", default=None)


def current_settings() -> Settings:
    """Settings of the run in progress, or the defaults outside any run."""
    return _ACTIVE.get() or DEFAULT_SETTINGS


@contextmanager
def use_settings(settings: Settings) -> Iterator[Settings]:
    """Make ``settings`` the fallback for every call that is not given settings explicitly."""
    token = _ACTIVE.set(settings)
    try:
        yield settings
    finally:
        _ACTIVE.reset(token)
