"""Composite quadrature in log radius with power-law tail extrapolation.

The grid covers ``[t_min, t_max]`` with log-spaced cells (profile breakpoints
are inserted as extra edges) and a Gauss-Legendre rule in ``u = log s`` on
each cell. Beyond the grid the integrand is assumed to behave like a power of
``s``; the exponent is fitted on the decade next to the boundary and also on
the two decades behind it, which is what the convergence verdict is based on.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Literal, Tuple

import numpy as np

from .errors import ArgumentError
from .settings import DEFAULT_SETTINGS, Settings, current_settings

logger = logging.getLogger(__name__)

Integrand = Callable[[np.ndarray], np.ndarray]
TailVerdict = Literal["converges", "diverges", "indeterminate"]

# Log-measure exponents this close to zero count as exactly critical.
CRITICAL_EXPONENT = 1e-9
FIT_DECADES = 3
FIT_POINTS_PER_DECADE = 8


@lru_cache(maxsize=None)
def _gauss_unit(order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights mapped to ``[0, 1]``."""
    x, w = np.polynomial.legendre.leggauss(order)
    return (x + 1.0) / 2.0, w / 2.0


def _log_rule(a: np.ndarray, b: np.ndarray, order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes/weights for ``∫_a^b h(s) ds`` with ``s = e^u``, one row per interval."""
    x, w = _gauss_unit(order)
    ua = np.log(a)[..., None]
    du = (np.log(b) - np.log(a))[..., None]
    nodes = np.exp(ua + du * x)
    weights = du * w * nodes
    return nodes, weights


def _power_piece(hb: float, b: float, kappa: float, x: np.ndarray) -> np.ndarray:
    """``∫`` of ``hb * (s/b)^(kappa-1)`` between ``b`` and ``x`` (either order, unsigned)."""
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        ratio = x / b
        if abs(kappa) <= CRITICAL_EXPONENT:
            return hb * b * np.abs(np.log(ratio))
        return hb * b * np.abs(np.expm1(kappa * np.log(ratio))) / abs(kappa)


@dataclass(frozen=True)
class TailFit:
    """Power-law fit of an integrand next to one end of the grid."""

    side: Literal["lower", "upper"]
    boundary: float
    boundary_value: float
    exponent: float
    decade_exponents: Tuple[float, ...]
    verdict: TailVerdict

    @property
    def vanishes(self) -> bool:
        return self.boundary_value == 0.0

    @property
    def kappa(self) -> float:
        """Exponent of the integrand with respect to ``ds/s``."""
        return self.exponent + 1.0

    def _convergent_sign(self) -> bool:
        return self.kappa > 0 if self.side == "lower" else self.kappa < 0

    def limit(self) -> float:
        """Integral from the boundary to ``0`` or ``∞``; ``inf`` when divergent."""
        if self.vanishes:
            return 0.0
        if self.verdict == "diverges" or not self._convergent_sign():
            return math.inf
        return self.boundary_value * self.boundary / abs(self.kappa)

    def piece(self, x: np.ndarray) -> np.ndarray:
        """Integral between the boundary and points ``x`` lying outside the grid."""
        if self.vanishes:
            return np.zeros_like(np.asarray(x, dtype=float))
        return _power_piece(self.boundary_value, self.boundary, self.kappa, np.asarray(x, dtype=float))

    def beyond(self, x: np.ndarray) -> np.ndarray:
        """Integral from points ``x`` outside the grid to ``0``/``∞``."""
        x = np.asarray(x, dtype=float)
        if self.vanishes:
            return np.zeros_like(x)
        if self.verdict == "diverges" or not self._convergent_sign():
            return np.full_like(x, math.inf)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            return self.boundary_value * self.boundary * (x / self.boundary) ** self.kappa / abs(self.kappa)


def fit_tail(
    h: Integrand,
    boundary: float,
    side: Literal["lower", "upper"],
    tolerance: float = DEFAULT_SETTINGS.verdict_tolerance,
    decades: int = FIT_DECADES,
) -> TailFit:
    """Fit ``h(s) ~ s^e`` over the ``decades`` next to ``boundary``.

    ``∫ h`` converges at ``∞`` iff ``e < -1`` and at ``0`` iff ``e > -1``.
    The verdict is ``converges`` when every decade clears the critical
    exponent by more than ``tolerance``, ``diverges`` when the boundary decade
    sits at or beyond it and no decade clears it, and ``indeterminate``
    otherwise (slowly converging powers, oscillating or drifting tails).
    """
    per = FIT_POINTS_PER_DECADE
    steps = np.linspace(-decades, 0.0, decades * per + 1)
    if side == "lower":
        steps = -steps
    s = boundary * 10.0 ** steps
    with np.errstate(all="ignore"):
        values = np.abs(np.asarray(h(s), dtype=float))
    hb = float(values[-1])
    if not math.isfinite(hb):
        return TailFit(side, boundary, hb, math.nan, (), "diverges")
    if hb == 0.0:
        return TailFit(side, boundary, 0.0, math.nan, (), "converges")

    slopes = []
    for j in range(decades):
        seg = slice(j * per, (j + 1) * per + 1)
        vs, ss = values[seg], s[seg]
        keep = (vs > 0) & np.isfinite(vs)
        if keep.sum() < 2:
            slopes.append(math.nan)
            continue
        slopes.append(float(np.polyfit(np.log(ss[keep]), np.log(vs[keep]), 1)[0]))
    exponent = slopes[-1]
    sign = 1.0 if side == "lower" else -1.0
    margins = [sign * (e + 1.0) if math.isfinite(e) else math.inf for e in slopes]
    boundary_margin = margins[-1]

    if all(m > tolerance for m in margins):
        verdict: TailVerdict = "converges"
    elif boundary_margin <= CRITICAL_EXPONENT and all(m < tolerance for m in margins):
        verdict = "diverges"
    else:
        verdict = "indeterminate"
    if verdict == "indeterminate":
        logger.debug(
            "tail fit at %s=%g could not classify exponents %s", side, boundary, slopes
        )
    return TailFit(side, boundary, hb, exponent, tuple(slopes), verdict)


class LogQuadrature:
    """Gauss-Legendre rule in ``log s`` on log-spaced cells of ``[t_min, t_max]``."""

    def __init__(
        self,
        t_min: float = DEFAULT_SETTINGS.t_min,
        t_max: float = DEFAULT_SETTINGS.t_max,
        cells_per_decade: int = DEFAULT_SETTINGS.cells_per_decade,
        order: int = DEFAULT_SETTINGS.gauss_order,
        breakpoints: Iterable[float] = (),
        tolerance: float = DEFAULT_SETTINGS.verdict_tolerance,
    ) -> None:
        if not (0 < t_min < t_max < math.inf):
            raise ArgumentError(f"invalid quadrature range [{t_min}, {t_max}]")
        n_cells = max(1, math.ceil(math.log10(t_max / t_min) * cells_per_decade))
        edges = np.geomspace(t_min, t_max, n_cells + 1)
        extra = [float(b) for b in breakpoints if math.isfinite(b) and t_min < b < t_max]
        if extra:
            edges = np.unique(np.concatenate([edges, extra]))
        self.t_min = float(t_min)
        self.t_max = float(t_max)
        self.cells_per_decade = cells_per_decade
        self.order = order
        self.tolerance = tolerance
        self.edges = edges
        self.nodes, self.weights = _log_rule(edges[:-1], edges[1:], order)

    @classmethod
    def from_settings(
        cls, settings: Settings | None = None, breakpoints: Iterable[float] = ()
    ) -> "LogQuadrature":
        s = settings or current_settings()
        return cls(
            s.t_min, s.t_max, s.cells_per_decade, s.gauss_order, breakpoints, s.verdict_tolerance
        )

    def with_breakpoints(self, breakpoints: Iterable[float]) -> "LogQuadrature":
        merged = list(self.edges[1:-1]) + list(breakpoints)
        return LogQuadrature(
            self.t_min, self.t_max, self.cells_per_decade, self.order, merged, self.tolerance
        )

    def table(self, h: Integrand) -> "CumulativeTable":
        return CumulativeTable(self, h)

    def integrate(self, h: Integrand, lo: float = 0.0, hi: float = math.inf) -> float:
        return self.table(h).between(lo, hi)


class CumulativeTable:
    """Cell integrals of one integrand plus both tails, queried as ball/tail masses."""

    def __init__(self, quad: LogQuadrature, h: Integrand) -> None:
        self.quad = quad
        self.h = h
        with np.errstate(all="ignore"):
            values = np.asarray(h(quad.nodes), dtype=float)
        values = np.where(np.isnan(values), 0.0, values)
        self.cells = (values * quad.weights).sum(axis=1)
        self.prefix = np.concatenate([[0.0], np.cumsum(self.cells)])
        self.suffix = np.concatenate([np.cumsum(self.cells[::-1])[::-1], [0.0]])
        self.lower = fit_tail(h, quad.t_min, "lower", quad.tolerance)
        self.upper = fit_tail(h, quad.t_max, "upper", quad.tolerance)
        self.lower_value = self.lower.limit()
        self.upper_value = self.upper.limit()

    @property
    def inner(self) -> float:
        return float(self.prefix[-1])

    @property
    def total(self) -> float:
        return self.lower_value + self.inner + self.upper_value

    @property
    def finite(self) -> bool:
        return math.isfinite(self.total)

    def _cell_index(self, x: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self.quad.edges, x, side="right") - 1
        return np.clip(idx, 0, len(self.cells) - 1)

    def _segment(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """GL integral over sub-intervals ``[a, b]`` of single cells."""
        out = np.zeros(np.shape(a))
        mask = b > a
        if not np.any(mask):
            return out
        nodes, weights = _log_rule(a[mask], b[mask], self.quad.order)
        with np.errstate(all="ignore"):
            vals = np.asarray(self.h(nodes), dtype=float)
        vals = np.where(np.isnan(vals), 0.0, vals)
        out[mask] = (vals * weights).sum(axis=-1)
        return out

    def ball(self, x) -> np.ndarray:
        """``∫_0^x h`` for every entry of ``x``."""
        x = np.asarray(x, dtype=float)
        flat = x.ravel()
        out = np.empty_like(flat)
        q = self.quad
        below = flat <= q.t_min
        above = flat >= q.t_max
        mid = ~(below | above)
        if np.any(below):
            if math.isinf(self.lower_value):
                out[below] = math.inf
            else:
                out[below] = self.lower.beyond(flat[below])
        if np.any(mid):
            xm = flat[mid]
            idx = self._cell_index(xm)
            out[mid] = self.lower_value + self.prefix[idx] + self._segment(q.edges[idx], xm)
        if np.any(above):
            out[above] = self.lower_value + self.inner + self.upper.piece(flat[above])
        return out.reshape(x.shape)

    def tail(self, x) -> np.ndarray:
        """``∫_x^∞ h`` for every entry of ``x``."""
        x = np.asarray(x, dtype=float)
        flat = x.ravel()
        out = np.empty_like(flat)
        q = self.quad
        below = flat <= q.t_min
        above = flat >= q.t_max
        mid = ~(below | above)
        if np.any(below):
            out[below] = self.upper_value + self.inner + self.lower.piece(flat[below])
        if np.any(mid):
            xm = flat[mid]
            idx = self._cell_index(xm)
            out[mid] = self.upper_value + self.suffix[idx + 1] + self._segment(xm, q.edges[idx + 1])
        if np.any(above):
            if math.isinf(self.upper_value):
                out[above] = math.inf
            else:
                out[above] = self.upper.beyond(flat[above])
        return out.reshape(x.shape)

    def between(self, lo: float, hi: float) -> float:
        """``∫_lo^hi h`` for a single interval, tails included where needed."""
        if lo < 0 or math.isnan(lo) or math.isnan(hi):
            raise ArgumentError(f"invalid interval ({lo}, {hi})")
        if hi <= lo:
            return 0.0
        if lo == 0.0:
            return float(self.ball(hi))
        if math.isinf(hi):
            return float(self.tail(lo))
        q = self.quad
        total = 0.0
        if lo < q.t_min:
            b = min(hi, q.t_min)
            total += float(self.lower.piece(np.array(lo)) - self.lower.piece(np.array(b)))
        if hi > q.t_max:
            a = max(lo, q.t_max)
            total += float(self.upper.piece(np.array(hi)) - self.upper.piece(np.array(a)))
        a, b = max(lo, q.t_min), min(hi, q.t_max)
        if b > a:
            i = int(self._cell_index(np.array([a]))[0])
            j = int(self._cell_index(np.array([b]))[0])
            if i == j:
                total += float(self._segment(np.array([a]), np.array([b]))[0])
            else:
                total += float(self._segment(np.array([a]), np.array([q.edges[i + 1]]))[0])
                total += float(self.prefix[j] - self.prefix[i + 1])
                total += float(self._segment(np.array([q.edges[j]]), np.array([b]))[0])
        return total
