"""Suprema of products of ball/tail masses over radii.

Every condition functional has the shape ``sup_t Π_i F_i(c_i t)^{e_i}`` (or the
two-radius analogue), where each ``F_i`` is the mass of some radial density on
a ball or on the complement of a ball. The scan works with ``log Φ``:

* a log grid over ``[t_min, t_max]`` with the relevant breakpoints inserted,
  followed by a bounded scalar refinement around the best grid point;
* the verdict at each end comes from the growth rate of ``log Φ`` toward
  the boundary, fitted on the three decades next to it.

Products use ``0 * ∞ = 0``: a vanishing factor wins over a divergent one.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, List, Literal, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from schemas.report import ConditionReport, TailDiagnostics

from .settings import Settings, current_settings

logger = logging.getLogger(__name__)

Mass = Callable[[np.ndarray], np.ndarray]
EndVerdict = Literal["true", "false", "indeterminate"]

FLAT_GROWTH = 1e-7
DECELERATION = 0.5


@dataclass(frozen=True)
class Factor:
    """``mass(scale * t) ** power`` as a function of one radius."""

    mass: Mass
    power: float
    scale: float = 1.0
    label: str = ""
    uncertain: bool = False
    notes: Tuple[str, ...] = ()

    def log_term(self, t: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            v = np.asarray(self.mass(self.scale * np.asarray(t, dtype=float)), dtype=float)
            out = self.power * np.log(v)
        # 0^0 and inf^0 are 1
        return np.where(self.power == 0.0, 0.0, out)


@dataclass(frozen=True)
class JointFactor:
    """``mass(s1 * t, s2 * τ) ** power`` returning a ``len(t) x len(τ)`` matrix."""

    mass: Callable[[np.ndarray, np.ndarray], np.ndarray]
    power: float
    scales: Tuple[float, float] = (1.0, 1.0)
    label: str = ""
    uncertain: bool = False
    notes: Tuple[str, ...] = ()

    def log_term(self, t: np.ndarray, tau: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            v = np.asarray(
                self.mass(self.scales[0] * np.asarray(t, float), self.scales[1] * np.asarray(tau, float)),
                dtype=float,
            )
            return self.power * np.log(v)


@dataclass(frozen=True)
class AxisFactor:
    """A one-radius factor inside a two-radius product (``axis`` is 1 or 2)."""

    factor: Factor
    axis: int

    @property
    def uncertain(self) -> bool:
        return self.factor.uncertain

    @property
    def notes(self) -> Tuple[str, ...]:
        return self.factor.notes


def combine_logs(terms: Sequence[np.ndarray]) -> np.ndarray:
    """Sum of log-factors with ``0 * ∞ = 0``."""
    if not terms:
        raise ValueError("empty product")
    stack = np.broadcast_arrays(*terms)
    arr = np.stack(stack)
    arr = np.where(np.isnan(arr), -np.inf, arr)
    zero = np.any(arr == -np.inf, axis=0)
    with np.errstate(invalid="ignore"):
        total = np.where(np.isinf(arr), 0.0, arr).sum(axis=0)
    infinite = np.any(arr == np.inf, axis=0)
    total = np.where(infinite, np.inf, total)
    return np.where(zero, -np.inf, total)


def _decade_slopes(logt: np.ndarray, logphi: np.ndarray, side: str, decades: int = 3) -> List[float]:
    """Growth of ``log Φ`` per unit of ``log(1/t)`` (lower) or ``log t`` (upper), boundary decade last."""
    ln10 = math.log(10.0)
    slopes: List[float] = []
    if side == "lower":
        edge = logt[0]
        bounds = [(edge + (j + 1) * ln10, edge + j * ln10) for j in reversed(range(decades))]
    else:
        edge = logt[-1]
        bounds = [(edge - (j + 1) * ln10, edge - j * ln10) for j in reversed(range(decades))]
    for lo, hi in bounds:
        a, b = min(lo, hi), max(lo, hi)
        sel = (logt >= a - 1e-12) & (logt <= b + 1e-12)
        y = logphi[sel]
        x = logt[sel]
        if np.any(y == -np.inf):
            slopes.append(-math.inf)
            continue
        if len(x) < 2:
            slopes.append(math.nan)
            continue
        slope = float(np.polyfit(x, y, 1)[0])
        slopes.append(-slope if side == "lower" else slope)
    return slopes


def end_verdict(slopes: Sequence[float], tolerance: float) -> EndVerdict:
    """Classify ``sup`` toward one boundary from the decade growth rates."""
    g_b = slopes[-1]
    g_in = slopes[-2] if len(slopes) > 1 else math.nan
    if math.isnan(g_b) or g_b <= FLAT_GROWTH:
        return "true"
    if math.isfinite(g_in) and g_in > FLAT_GROWTH and g_b / g_in < DECELERATION:
        return "true"
    if g_b > tolerance:
        return "false"
    return "indeterminate"


def _scan_grid(settings: Settings, n: int, extra: Iterable[float]) -> Tuple[np.ndarray, np.ndarray]:
    base = np.geomspace(settings.t_min, settings.t_max, n)
    pts = [x for x in extra if math.isfinite(x) and settings.t_min < x < settings.t_max]
    full = np.unique(np.concatenate([base, pts])) if pts else base
    return base, full


def _merge(overall: List[EndVerdict]) -> EndVerdict:
    if "false" in overall:
        return "false"
    if "indeterminate" in overall:
        return "indeterminate"
    return "true"


def scan_supremum(
    condition: str,
    factors: Sequence[Factor],
    settings: Settings | None = None,
    extra_points: Iterable[float] = (),
    notes: Iterable[str] = (),
) -> ConditionReport:
    """``sup_t Π F_i`` over the scan grid, refined near the best grid point."""
    s = settings or current_settings()
    base, grid = _scan_grid(s, s.scan_points, extra_points)

    def log_phi(t: np.ndarray) -> np.ndarray:
        return combine_logs([f.log_term(t) for f in factors])

    values = log_phi(grid)
    diag_notes = list(notes)
    for f in factors:
        diag_notes.extend(f.notes)
    uncertain = any(f.uncertain for f in factors)

    if np.any(values == np.inf):
        idx = int(np.argmax(values == np.inf))
        diag_notes.append(f"product is infinite at t={grid[idx]:.6g}")
        return _report(condition, math.inf, [float(grid[idx])], "false", grid, values, None, None, diag_notes)
    if np.all(values == -np.inf):
        return _report(condition, 0.0, [float(grid[0])], "true", grid, values, None, None, diag_notes)

    base_values = log_phi(base)
    logt = np.log(base)
    low = _decade_slopes(logt, base_values, "lower")
    high = _decade_slopes(logt, base_values, "upper")
    low_v = end_verdict(low, s.verdict_tolerance)
    high_v = end_verdict(high, s.verdict_tolerance)
    verdict = _merge([low_v, high_v])
    if verdict == "true" and uncertain:
        verdict = "indeterminate"

    idx = int(np.argmax(values))
    best_t, best = float(grid[idx]), float(values[idx])
    lo_u = math.log(grid[max(idx - 1, 0)])
    hi_u = math.log(grid[min(idx + 1, len(grid) - 1)])
    if hi_u > lo_u:
        res = optimize.minimize_scalar(
            lambda u: -float(log_phi(np.array([math.exp(u)]))[0]),
            bounds=(lo_u, hi_u),
            method="bounded",
            options={"xatol": 1e-10},
        )
        if res.success and math.isfinite(res.fun) and -res.fun > best:
            best, best_t = -float(res.fun), math.exp(float(res.x))

    value = math.inf if verdict == "false" else math.exp(best)
    return _report(
        condition,
        value,
        [best_t],
        verdict,
        grid,
        values,
        (low, low_v),
        (high, high_v),
        diag_notes,
    )


def _report(
    condition: str,
    value: float,
    argmax: List[float],
    verdict: EndVerdict,
    grid: np.ndarray,
    logvalues: np.ndarray,
    low: Optional[Tuple[List[float], EndVerdict]],
    high: Optional[Tuple[List[float], EndVerdict]],
    notes: List[str],
) -> ConditionReport:
    with np.errstate(over="ignore"):
        phi = np.exp(logvalues)
    diag = TailDiagnostics(
        low_growth=low[0][-1] if low else None,
        high_growth=high[0][-1] if high else None,
        low_verdict=low[1] if low else None,
        high_verdict=high[1] if high else None,
        notes=notes,
    )
    return ConditionReport(
        condition=condition,
        value=value,
        argmax=argmax,
        finite=verdict,
        diagnostics=diag,
        scan_t=grid.tolist(),
        scan_value=phi.tolist(),
    )


def scan_supremum_2d(
    condition: str,
    factors: Sequence[AxisFactor | JointFactor],
    settings: Settings | None = None,
    extra_points: Tuple[Iterable[float], Iterable[float]] = ((), ()),
    notes: Iterable[str] = (),
) -> ConditionReport:
    """``sup_{t, τ}`` of a product of one- and two-radius factors.

    The verdict applies the one-dimensional end analysis to the marginal
    maxima ``t ↦ max_τ log Φ`` and ``τ ↦ max_t log Φ``.
    """
    s = settings or current_settings()
    base1, grid1 = _scan_grid(s, s.scan_points_2d, extra_points[0])
    base2, grid2 = _scan_grid(s, s.scan_points_2d, extra_points[1])

    def log_phi(t: np.ndarray, tau: np.ndarray) -> np.ndarray:
        terms = []
        for f in factors:
            if isinstance(f, JointFactor):
                terms.append(f.log_term(t, tau))
            elif f.axis == 1:
                terms.append(f.factor.log_term(t)[:, None])
            else:
                terms.append(f.factor.log_term(tau)[None, :])
        shape = (len(t), len(tau))
        return combine_logs([np.broadcast_to(x, shape) for x in terms])

    values = log_phi(grid1, grid2)
    diag_notes = list(notes)
    for f in factors:
        diag_notes.extend(f.notes)
    uncertain = any(f.uncertain for f in factors)
    empty = np.array([])

    if np.any(values == np.inf):
        i, j = np.unravel_index(int(np.argmax(values == np.inf)), values.shape)
        diag_notes.append(f"product is infinite at (t, τ)=({grid1[i]:.6g}, {grid2[j]:.6g})")
        return _report(condition, math.inf, [float(grid1[i]), float(grid2[j])], "false", empty, empty, None, None, diag_notes)
    if np.all(values == -np.inf):
        return _report(condition, 0.0, [float(grid1[0]), float(grid2[0])], "true", empty, empty, None, None, diag_notes)

    base_values = log_phi(base1, base2)
    marg1 = base_values.max(axis=1)
    marg2 = base_values.max(axis=0)
    ends = []
    for logt, marg in ((np.log(base1), marg1), (np.log(base2), marg2)):
        for side in ("lower", "upper"):
            slopes = _decade_slopes(logt, marg, side)
            ends.append((slopes, end_verdict(slopes, s.verdict_tolerance)))
    verdict = _merge([v for _, v in ends])
    if verdict == "true" and uncertain:
        verdict = "indeterminate"

    i, j = np.unravel_index(int(np.argmax(values)), values.shape)
    best = float(values[i, j])
    best_pt = [float(grid1[i]), float(grid2[j])]
    u_lo = (math.log(s.t_min), math.log(s.t_min))
    u_hi = (math.log(s.t_max), math.log(s.t_max))

    def objective(u: np.ndarray) -> float:
        u = np.clip(u, u_lo, u_hi)
        val = log_phi(np.array([math.exp(u[0])]), np.array([math.exp(u[1])]))[0, 0]
        return -float(val) if math.isfinite(val) else 1e300

    res = optimize.minimize(
        objective,
        x0=np.log(best_pt),
        method="Nelder-Mead",
        options={"xatol": 1e-8, "fatol": 1e-12, "maxiter": 400},
    )
    if math.isfinite(res.fun) and -res.fun > best:
        best = -float(res.fun)
        best_pt = [float(x) for x in np.exp(np.clip(res.x, u_lo, u_hi))]

    notes_all = diag_notes + [
        f"axis {k // 2 + 1} {'lower' if k % 2 == 0 else 'upper'} end: {v}" for k, (_, v) in enumerate(ends)
    ]
    value = math.inf if verdict == "false" else math.exp(best)
    low = (ends[0][0], ends[0][1])
    high = (ends[1][0], ends[1][1])
    return _report(condition, value, best_pt, verdict, empty, empty, low, high, notes_all)


__all__ = [
    "AxisFactor",
    "Factor",
    "JointFactor",
    "combine_logs",
    "end_verdict",
    "scan_supremum",
    "scan_supremum_2d",
]
