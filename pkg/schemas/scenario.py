"""
Pydantic models for scenario files.

A scenario file **must** have:
• scenarios: list[Scenario]   (may be empty)

and may carry ``settings`` overrides (any field of ``potential_utils.settings.Settings``).

Each Scenario names a ``task``:
    - conditions: evaluate the condition functionals of ``theorem``
    - sweep:      conditions plus ratio measurements and a consistency verdict
    - duality:    both sides of the cone duality for ``w`` and ``g``
    - oracle:     operator values against direct kernel quadrature at ``probes``

Weights and profiles use the declarative record format, e.g.
``{"family": "power", "scale": 1.0, "exponent": -0.5}``; product objects use
``{"family": "separable", "first": {...}, "second": {...}}``. Files are JSON
or TOML; unknown keys are rejected.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

try:  # Python 3.11+
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - older Python
    try:
        import tomli as tomllib  # type: ignore
    except ModuleNotFoundError:
        tomllib = None  # type: ignore

Task = Literal["conditions", "sweep", "duality", "oracle"]
Theorem = Literal[
    "riesz",
    "hardy_cone",
    "far_piece",
    "hardy",
    "product_riesz",
    "trace",
    "product_hardy",
    "double_hardy",
]
SWEEP_THEOREMS = ("riesz", "hardy_cone", "far_piece", "product_riesz", "trace")
PRODUCT_THEOREMS = ("product_riesz", "trace", "product_hardy", "double_hardy")
ALPHA_THEOREMS = ("riesz", "far_piece")


class _Spec(BaseModel):
    model_config = ConfigDict(extra="forbid")


class GroupSpec(_Spec):
    """Either ``euclidean: n`` or the abstract triple ``(Q, sigma, c0)``."""

    euclidean: Optional[int] = Field(default=None, ge=1)
    Q: Optional[float] = Field(default=None, gt=0)
    sigma: Optional[float] = Field(default=None, gt=0)
    c0: float = Field(default=1.0, ge=1.0)

    @model_validator(mode="after")
    def _one_form(self) -> "GroupSpec":
        if self.euclidean is None and (self.Q is None or self.sigma is None):
            raise ValueError("give either 'euclidean' or both 'Q' and 'sigma'")
        if self.euclidean is not None and (self.Q is not None or self.sigma is not None):
            raise ValueError("'euclidean' fixes Q and sigma; do not give them as well")
        return self


class ProductSpec(_Spec):
    first: GroupSpec
    second: GroupSpec


class Scenario(_Spec):
    name: str = Field(min_length=1)
    task: Task
    theorem: Optional[Theorem] = None
    geometry: Union[GroupSpec, ProductSpec]
    p: float = Field(default=2.0, gt=1.0)
    q: Optional[float] = Field(default=None, gt=1.0)
    alpha: Optional[float] = Field(default=None, gt=0)
    alpha1: Optional[float] = Field(default=None, gt=0)
    alpha2: Optional[float] = Field(default=None, gt=0)
    a: float = Field(default=1.0, gt=0)
    b: float = Field(default=1.0, gt=0)
    variant: Optional[str] = None
    w: Optional[Dict[str, Any]] = None
    v: Optional[Dict[str, Any]] = None
    g: Optional[Dict[str, Any]] = None
    f: Optional[Dict[str, Any]] = None
    operator: Optional[str] = None
    probes: List[Union[float, List[float]]] = Field(default_factory=list)
    family: Literal["indicator", "truncated_power", "two_step", "geometric", "all"] = "all"
    budget: Optional[int] = Field(default=None, ge=0)
    seed: Optional[int] = Field(default=None, ge=0)

    @field_validator("w", "v", "g", "f")
    @classmethod
    def _has_family(cls, record: Optional[Dict[str, Any]]) -> Optional[Dict[str, Any]]:
        if record is not None and "family" not in record:
            raise ValueError("profile records need a 'family' key")
        return record

    @property
    def is_product(self) -> bool:
        return isinstance(self.geometry, ProductSpec)

    @property
    def exponent_q(self) -> float:
        return self.p if self.q is None else self.q

    @model_validator(mode="after")
    def _consistent(self) -> "Scenario":
        if self.task in ("conditions", "sweep"):
            if self.theorem is None:
                raise ValueError(f"task '{self.task}' needs 'theorem'")
            if self.task == "sweep" and self.theorem not in SWEEP_THEOREMS:
                raise ValueError(f"theorem '{self.theorem}' has no ratio sweep; use one of {SWEEP_THEOREMS}")
            if (self.theorem in PRODUCT_THEOREMS) != self.is_product:
                raise ValueError(f"theorem '{self.theorem}' does not match the geometry (single vs product)")
            if self.theorem != "trace" and self.w is None:
                raise ValueError(f"theorem '{self.theorem}' needs the domain weight 'w'")
            if self.v is None:
                raise ValueError(f"theorem '{self.theorem}' needs the target weight 'v'")
            if self.theorem in ALPHA_THEOREMS and self.alpha is None:
                raise ValueError(f"theorem '{self.theorem}' needs 'alpha'")
            if self.theorem in ("product_riesz", "trace") and (self.alpha1 is None or self.alpha2 is None):
                raise ValueError(f"theorem '{self.theorem}' needs 'alpha1' and 'alpha2'")
        elif self.task == "duality":
            if self.w is None or self.g is None:
                raise ValueError("task 'duality' needs 'w' and 'g'")
        elif self.task == "oracle":
            if self.operator is None or self.f is None or not self.probes:
                raise ValueError("task 'oracle' needs 'operator', 'f' and 'probes'")
        if self.q is not None and self.q < self.p:
            raise ValueError(f"need p <= q, got p={self.p}, q={self.q}")
        for value in (self.p, self.exponent_q):
            if not math.isfinite(value):
                raise ValueError("exponents must be finite")
        return self


class ScenarioFile(_Spec):
    settings: Dict[str, Any] = Field(default_factory=dict)
    scenarios: List[Scenario] = Field(default_factory=list)

    @model_validator(mode="after")
    def _unique_names(self) -> "ScenarioFile":
        names = [s.name for s in self.scenarios]
        duplicates = sorted({n for n in names if names.count(n) > 1})
        if duplicates:
            raise ValueError(f"duplicate scenario names: {duplicates}")
        return self


def load_scenario_file(path: Path) -> ScenarioFile:
    """Parse a JSON or TOML scenario file; raises ``pydantic.ValidationError`` on bad content."""
    if path.suffix.lower() == ".toml":
        if tomllib is None:  # pragma: no cover - older Python
            raise RuntimeError("TOML scenario files need Python 3.11+")
        with path.open("rb") as fh:
            data = tomllib.load(fh)
    else:
        with path.open() as fh:
            data = json.load(fh)
    return ScenarioFile.model_validate(data)
