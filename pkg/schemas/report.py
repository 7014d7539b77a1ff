"""
Pydantic models for everything the verification runs write out.

Numbers may be ``inf`` (a supremum that is infinite) or ``nan`` (a quantity
that could not be computed); the models serialise them as the JSON constants
``Infinity`` / ``NaN`` so that ``json.loads`` reads them back unchanged.
"""

from __future__ import annotations

from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

Tristate = Literal["true", "false", "indeterminate"]


class _Report(BaseModel):
    model_config = ConfigDict(extra="forbid", ser_json_inf_nan="constants")


class TailDiagnostics(_Report):
    """How the supremum behaves toward ``t -> 0`` and ``t -> ∞``."""

    low_growth: Optional[float] = None
    high_growth: Optional[float] = None
    low_verdict: Optional[Tristate] = None
    high_verdict: Optional[Tristate] = None
    notes: List[str] = Field(default_factory=list)


class ConditionReport(_Report):
    condition: str
    value: float
    argmax: List[float]
    finite: Tristate
    diagnostics: TailDiagnostics = Field(default_factory=TailDiagnostics)
    scan_t: List[float] = Field(default_factory=list)
    scan_value: List[float] = Field(default_factory=list)

    @property
    def verdict(self) -> str:
        return {"true": "finite", "false": "infinite", "indeterminate": "indeterminate"}[self.finite]


class DoublingReport(_Report):
    weight_class: str
    constant_b: float
    member: Tristate
    argmax: List[float] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)


class ProfileRecord(_Report):
    """Step profile ``values[i]`` on ``[grid[i-1], grid[i])``."""

    grid: List[float]
    values: List[float]
    tail: float = 0.0


class DualityReport(_Report):
    lhs_lower_bound: float
    rhs_value: float
    rhs_terms: Tuple[float, float]
    regime: Literal["corollary", "general"]
    witness: ProfileRecord
    ratio_bracket: Tuple[float, float]
    evaluations: int = 0
    notes: List[str] = Field(default_factory=list)


class TracePoint(_Report):
    family: str
    parameter: float
    ratio: float


class RatioReport(_Report):
    """Best ratio found; ``witness`` is the maximizer in the declarative profile format.

    ``image_t``/``image_value`` sample the operator image of the witness on the
    output grid (``grid_density`` points per decade).
    """

    best_ratio: float
    witness: Optional[Dict[str, Any]] = None
    family_trace: List[TracePoint] = Field(default_factory=list)
    skipped: List[str] = Field(default_factory=list)
    unbounded: Tristate = "indeterminate"
    evaluations: int = 0
    image_t: List[float] = Field(default_factory=list)
    image_value: List[float] = Field(default_factory=list)


class Verdict(_Report):
    conditions_finite: Dict[str, Tristate]
    ratio_bounded: Tristate
    consistent: bool
    indeterminate: bool
    hypothesis_branch: Optional[str] = None


class OracleRecord(_Report):
    probe: List[float]
    value: float
    oracle: float
    relative_error: float


class Provenance(_Report):
    tool_version: str
    seed: int
    settings: Dict[str, Any]
    scenario: Dict[str, Any]


class ReportBundle(_Report):
    scenario: str
    task: str
    provenance: Provenance
    hypotheses: List[str] = Field(default_factory=list)
    conditions: List[ConditionReport] = Field(default_factory=list)
    doubling: List[DoublingReport] = Field(default_factory=list)
    duality: Optional[DualityReport] = None
    product_duality: Optional[Dict[str, float]] = None
    ratio: Optional[RatioReport] = None
    verdict: Optional[Verdict] = None
    oracle: List[OracleRecord] = Field(default_factory=list)
    skipped: Optional[str] = None
    errors: List[str] = Field(default_factory=list)
