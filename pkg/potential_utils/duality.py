"""Duality on the cone of radially decreasing functions.

For ``g >= 0`` with ``H(t) = ∫_{B(e,t)} g``,

    sup_{f decreasing} ∫ f g / ‖f‖_{L^p(w)}
        ≈ ‖w‖_1^{-1/p} ‖g‖_1 + (∫_G H(r)^{p'} W(r)^{-p'} w)^{1/p'}

The right-hand side is computed directly. The left-hand side is bounded from
below by maximizing over indicators of balls and then over decreasing step
profiles, so the two sides are compared as a bracket, never as an equality.
"""

from __future__ import annotations

import logging
import math
from typing import Callable, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import optimize

from schemas.report import DualityReport, ProfileRecord

from .conditions import ExponentPair, require_infinite_mass
from .errors import DivergenceError, RangeError
from .geometry import GroupGeometry, ProductGeometry, polar_table
from .product.surfaces import Surface, as_product_weight
from .quadrature import LogQuadrature
from .radial import (
    ComputedProfile,
    RadialProfile,
    RadialWeight,
    StepProfile,
    as_weight,
    total_mass_is_infinite,
)
from .settings import Settings, current_settings

logger = logging.getLogger(__name__)

# Cells of the ascent grid span this many decades on each side of the best ball.
ASCENT_HALF_SPAN = 3.0
RANDOM_STARTS = 2


class DualityTerms(NamedTuple):
    first: float
    second: float

    @property
    def total(self) -> float:
        return self.first + self.second


class ProductDualityTerms(NamedTuple):
    """The four summands; ``I2`` integrates over ``G1`` and ``I3`` over ``G2``."""

    I1: float
    I2: float
    I3: float
    I4: float

    @property
    def total(self) -> float:
        return self.I1 + self.I2 + self.I3 + self.I4


def _ball(geom: GroupGeometry, profile) -> Callable[[np.ndarray], np.ndarray]:
    sigma, q1 = geom.sigma, geom.Q - 1.0
    return lambda t: sigma * profile.moment(q1, 0.0, t)


def _total(geom: GroupGeometry, profile) -> float:
    return float(geom.sigma * profile.moment(geom.Q - 1.0, 0.0, math.inf))


def _ball_functional(
    geom: GroupGeometry,
    p: float,
    w: RadialWeight,
    H: Callable[[np.ndarray], np.ndarray],
    breakpoints: Iterable[float],
    settings: Settings | None,
    where: str = "second",
) -> float:
    """``(∫_G H(r)^{p'} W(r)^{-p'} w)^{1/p'}``."""
    pp = p / (p - 1.0)
    W = _ball(geom, w)

    def density(s: np.ndarray) -> np.ndarray:
        h = np.asarray(H(s), dtype=float)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            return np.where(h == 0.0, 0.0, (h / W(s)) ** pp * w(s))

    table = polar_table(geom, density, list(breakpoints) + list(w.breakpoints), settings)
    if not table.finite:
        side = "origin" if math.isinf(table.lower_value) else "infinity"
        raise DivergenceError(f"{where}:{side}", partial=table.inner, message=f"the {where} summand diverges at the {side}")
    return table.total ** (1.0 / pp)


def duality_rhs(
    geom: GroupGeometry,
    p: float,
    w: RadialProfile | RadialWeight,
    g: RadialProfile,
    settings: Settings | None = None,
) -> DualityTerms:
    """Both summands of the right-hand side; the first is ``0`` when ``‖w‖_1 = ∞``."""
    w = as_weight(w)
    norm_g = _total(geom, g)
    if norm_g == 0.0:
        return DualityTerms(0.0, 0.0)
    if total_mass_is_infinite(geom, w, settings).infinite:
        first = 0.0
    else:
        first = _total(geom, w) ** (-1.0 / p) * norm_g
    second = _ball_functional(geom, p, w, _ball(geom, g), g.breakpoints, settings)
    return DualityTerms(first, second)


# --------------------------------------------------------------------------- cone maximization


class _ConeObjective:
    """``∫ f g / ‖f‖_{L^p(w)}`` for step heights on fixed cells, counting evaluations."""

    def __init__(self, geom: GroupGeometry, p: float, w: RadialWeight, g: RadialProfile, edges: np.ndarray) -> None:
        left = np.concatenate([[0.0], edges])
        right = np.concatenate([edges, [math.inf]])
        sigma, q1 = geom.sigma, geom.Q - 1.0
        self.p = p
        self.edges = edges
        self.M = sigma * np.asarray(w.moment(q1, left, right), dtype=float)
        self.G = sigma * np.asarray(g.moment(q1, left, right), dtype=float)
        # an unbounded last cell of infinite w-mass forces a zero tail
        self.free = np.isfinite(self.M) & (self.M > 0)
        self.evaluations = 0

    def __call__(self, x: np.ndarray) -> float:
        self.evaluations += 1
        x = np.where(self.free, x, 0.0)
        norm = np.sum(self.M[self.free] * x[self.free] ** self.p) ** (1.0 / self.p)
        if norm == 0.0:
            return 0.0
        num = np.sum(np.where(x == 0.0, 0.0, self.G * x))
        return float(num / norm)

    def gradient(self, x: np.ndarray) -> np.ndarray:
        """Gradient in the ``M``-weighted inner product at a point normalized to ``‖x‖ = 1``."""
        with np.errstate(divide="ignore", invalid="ignore"):
            density = np.where(self.free, self.G / self.M, 0.0)
        return density - self(x) * np.where(self.free, x, 0.0) ** (self.p - 1.0)

    def normalize(self, x: np.ndarray) -> np.ndarray:
        x = np.where(self.free, np.maximum(x, 0.0), 0.0)
        norm = np.sum(self.M[self.free] * x[self.free] ** self.p) ** (1.0 / self.p)
        return x / norm if norm > 0 else x

    def project(self, y: np.ndarray) -> np.ndarray:
        free = self.free
        out = np.zeros_like(y)
        fitted = optimize.isotonic_regression(y[free], weights=self.M[free], increasing=False).x
        out[free] = np.maximum(fitted, 0.0)
        return out


def _ascent(obj: _ConeObjective, start: np.ndarray, budget: int) -> Tuple[np.ndarray, float]:
    x = obj.normalize(obj.project(start))
    best = obj(x)
    step = None
    stop = obj.evaluations + budget
    while obj.evaluations < stop:
        grad = obj.gradient(x)
        scale = float(np.max(np.abs(grad)))
        if scale == 0.0 or not math.isfinite(scale):
            break
        if step is None:
            step = float(np.max(x)) / scale if np.max(x) > 0 else 1.0 / scale
        candidate = obj.normalize(obj.project(x + step * grad))
        value = obj(candidate)
        if value > best * (1.0 + 1e-14):
            x, best = candidate, value
            step *= 1.5
        else:
            step *= 0.5
            if step * scale < 1e-12 * max(float(np.max(x)), 1e-300):
                break
    return x, best


def _indicator_scan(
    geom: GroupGeometry, p: float, w: RadialWeight, g: RadialProfile, settings: Settings
) -> Tuple[float, float, int]:
    """Best ``H(s)/W(s)^{1/p}`` over balls: ``(radius, ratio, evaluations)``."""
    H, W = _ball(geom, g), _ball(geom, w)
    bps = [b for b in list(g.breakpoints) + list(w.breakpoints) if settings.t_min < b < settings.t_max]
    s = np.unique(np.concatenate([np.geomspace(settings.t_min, settings.t_max, settings.scan_points), bps]))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.nan_to_num(H(s) / W(s) ** (1.0 / p), nan=0.0)
    i = int(np.argmax(ratio))
    best_s, best = float(s[i]), float(ratio[i])
    evaluations = len(s)
    if math.isfinite(best) and 0 < i < len(s) - 1:

        def negative(u: float) -> float:
            x = np.array([math.exp(u)])
            with np.errstate(divide="ignore", invalid="ignore"):
                return -float(np.nan_to_num(H(x) / W(x) ** (1.0 / p), nan=0.0)[0])

        res = optimize.minimize_scalar(
            negative, bounds=(math.log(s[i - 1]), math.log(s[i + 1])), method="bounded", options={"xatol": 1e-10}
        )
        evaluations += int(res.nfev)
        if -res.fun > best:
            best_s, best = math.exp(res.x), -float(res.fun)
    return best_s, best, evaluations


def _ascent_edges(center: float, g: RadialProfile, w: RadialWeight, cells: int, settings: Settings) -> np.ndarray:
    lo = max(settings.t_min, center * 10.0 ** -ASCENT_HALF_SPAN)
    hi = min(settings.t_max, center * 10.0 ** ASCENT_HALF_SPAN)
    bps = [b for b in list(g.breakpoints) + list(w.breakpoints) if settings.t_min <= b <= settings.t_max]
    if bps:
        lo, hi = min(lo, min(bps)), max(hi, max(bps))
    edges = np.geomspace(lo, hi, cells)
    return np.unique(np.concatenate([edges, bps, [center]]))


def duality_lhs_maximize(
    geom: GroupGeometry,
    p: float,
    w: RadialProfile | RadialWeight,
    g: RadialProfile,
    budget: Optional[int] = None,
    seed: Optional[int] = None,
    settings: Settings | None = None,
) -> DualityReport:
    """Lower bound for ``sup ∫ f g / ‖f‖_{L^p(w)}`` over decreasing ``f``.

    Ball indicators are scanned first; the best one, the Hölder candidate
    ``(g/w)^{1/(p-1)}`` and a few seeded random decreasing profiles then seed
    a projected gradient ascent on step heights, with the pool-adjacent
    violators projection keeping every iterate in the cone.
    """
    s = settings or current_settings()
    w = as_weight(w)
    budget = s.ascent_budget if budget is None else int(budget)
    rng = np.random.default_rng(s.seed if seed is None else seed)
    notes: List[str] = []

    try:
        terms = duality_rhs(geom, p, w, g, s)
    except DivergenceError as exc:
        notes.append(f"right-hand side diverges ({exc.where})")
        terms = DualityTerms(0.0, math.inf)
    infinite_mass = total_mass_is_infinite(geom, w, s).infinite is True
    regime = "corollary" if infinite_mass else "general"

    radius, indicator_ratio, evaluations = _indicator_scan(geom, p, w, g, s)
    best, best_ratio = StepProfile([radius], [1.0]), indicator_ratio

    if indicator_ratio > 0 and math.isfinite(indicator_ratio):
        edges = _ascent_edges(radius, g, w, s.ascent_cells, s)
        obj = _ConeObjective(geom, p, w, g, edges)
        starts = [np.concatenate([(edges <= radius).astype(float), [0.0]])]
        with np.errstate(divide="ignore", invalid="ignore"):
            starts.append(np.nan_to_num(np.where(obj.free, obj.G / obj.M, 0.0), nan=0.0) ** (1.0 / (p - 1.0)))
        for _ in range(RANDOM_STARTS):
            starts.append(np.sort(rng.random(len(edges) + 1))[::-1])
        share = max(1, budget // len(starts))
        for start in starts:
            x, value = _ascent(obj, start, share)
            if value > best_ratio:
                top = float(np.max(x))
                best_ratio = value
                best = StepProfile(edges, x[:-1] / top, x[-1] / top)
        evaluations += obj.evaluations
    elif indicator_ratio == 0.0:
        notes.append("g vanishes; every ratio is zero")

    rhs = terms.total
    if rhs > 0 and math.isfinite(rhs):
        bracket = (indicator_ratio / rhs, best_ratio / rhs)
    else:
        bracket = (0.0, 0.0) if best_ratio == 0.0 else (math.nan, math.nan)
    logger.debug("duality lhs %.6g (indicator %.6g) vs rhs %.6g", best_ratio, indicator_ratio, rhs)
    return DualityReport(
        lhs_lower_bound=best_ratio,
        rhs_value=rhs,
        rhs_terms=(terms.first, terms.second),
        regime=regime,
        witness=ProfileRecord(grid=best.grid.tolist(), values=best.values.tolist(), tail=best.tail),
        ratio_bracket=bracket,
        evaluations=evaluations,
        notes=notes,
    )


# --------------------------------------------------------------------------- companion inequalities


def tail_hardy_check(
    geom: GroupGeometry,
    p: float,
    w: RadialProfile | RadialWeight,
    f: RadialProfile,
    settings: Settings | None = None,
) -> Tuple[float, float]:
    """``(∫_G w (∫_{G\\B(e,r(x))} f)^p dx, ∫_G f^p W^p w^{1-p})``; the ``p``-th root of the first is at most ``p`` times that of the second."""
    w = as_weight(w)
    sigma, q1 = geom.sigma, geom.Q - 1.0
    W = _ball(geom, w)
    bps = list(f.breakpoints) + list(w.breakpoints)

    def outer(t: np.ndarray) -> np.ndarray:
        inner = sigma * f.moment(q1, t, math.inf)
        with np.errstate(invalid="ignore", over="ignore"):
            return np.where(inner == 0.0, 0.0, w(t) * inner ** p)

    def weighted(t: np.ndarray) -> np.ndarray:
        ft = np.asarray(f(t), dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return np.where(ft == 0.0, 0.0, ft ** p * W(t) ** p * w(t) ** (1.0 - p))

    sides = []
    for name, u in (("lhs", outer), ("rhs", weighted)):
        table = polar_table(geom, u, bps, settings)
        if not table.finite:
            side = "origin" if math.isinf(table.lower_value) else "infinity"
            raise DivergenceError(f"{name}:{side}", partial=table.inner)
        sides.append(table.total)
    return sides[0], sides[1]


def adjoint_criterion_check(
    geom: GroupGeometry,
    pair: ExponentPair,
    w: RadialProfile | RadialWeight,
    v: RadialProfile | RadialWeight,
    adjoint: Callable[[RadialProfile], RadialProfile],
    g: RadialProfile,
    settings: Settings | None = None,
) -> Tuple[float, float]:
    """Both sides of the dual inequality for one ``g``.

    ``(∫_G (∫_{B(e,r(x))} T*g)^{p'} W^{-p'} w)^{1/p'}`` against
    ``(∫_G g^{q'} v^{1-q'})^{1/q'}``; the best constant over a family of ``g``
    is the norm of ``T`` on decreasing functions.
    """
    w = as_weight(w)
    v = as_weight(v, allow_vanishing=True)
    require_infinite_mass(geom, w, settings)
    if _total(geom, g) == 0.0:
        return 0.0, 0.0
    qq = pair.q_prime
    image = adjoint(g)
    bps = list(g.breakpoints) + list(image.breakpoints)
    H = polar_table(geom, image, bps, settings).ball
    lhs = _ball_functional(geom, pair.p, w, H, bps, settings, where="lhs")

    def density(t: np.ndarray) -> np.ndarray:
        gt = np.asarray(g(t), dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return np.where(gt == 0.0, 0.0, gt ** qq * np.asarray(v(t), dtype=float) ** (1.0 - qq))

    table = polar_table(geom, density, bps + list(v.breakpoints), settings)
    if not table.finite:
        side = "origin" if math.isinf(table.lower_value) else "infinity"
        raise DivergenceError(f"rhs:{side}", partial=table.inner)
    return lhs, table.total ** (1.0 / qq)


def dyadic_sequence(
    geom2: GroupGeometry,
    w2: RadialProfile | RadialWeight,
    b: float,
    p: float,
    ks: Sequence[int],
    settings: Settings | None = None,
) -> pd.DataFrame:
    """Radii ``x_k`` with ``∫_{B(e2, b x_k)} w2^{1-p'} = 2^k``.

    When ``S = ∫_{G2} w2^{1-p'}`` is finite the density is rescaled to
    ``S = 1`` and only ``k <= 0`` is admissible (``x_0 = ∞``). The returned
    frame carries ``annulus_mass = ∫_{B(b x_{k+1}) \\ B(b x_k)}``, which equals
    ``2^k`` for consecutive indices.
    """
    if b <= 0:
        raise RangeError(f"dilation must be positive, got {b}")
    pp = p / (p - 1.0)
    u = as_weight(w2).pow(1.0 - pp).profile
    verdict = total_mass_is_infinite(geom2, u, settings)
    bounded = verdict.infinite is False
    if verdict.infinite is None:
        logger.warning("total mass of w2^(1-p') is indeterminate; treating it as infinite")
    scale = 1.0
    if bounded:
        total = _total(geom2, u)
        if not (total > 0 and math.isfinite(total)):
            raise RangeError(f"cannot normalize a bounded cumulative with total {total}")
        scale = 1.0 / total
        bad = [k for k in ks if k > 0]
        if bad:
            raise RangeError(f"bounded cumulative: indices {bad} lie outside k <= 0")
    C = _ball(geom2, u)

    def cumulative(x: float) -> float:
        return scale * float(C(np.array([b * x]))[0])

    if math.isinf(cumulative(1.0)):
        raise DivergenceError("origin", message="w2^(1-p') is not locally integrable")

    def solve(k: int) -> float:
        if bounded and k == 0:
            return math.inf
        target = k * math.log(2.0)

        def f(u_: float) -> float:
            c = cumulative(math.exp(u_))
            return (math.log(c) if c > 0 else -math.inf) - target

        lo, hi = -1.0, 1.0
        while f(lo) > 0 and lo > -700:
            lo *= 2.0
        while f(hi) < 0 and hi < 700:
            hi *= 2.0
        if not (f(lo) <= 0 <= f(hi)):
            raise RangeError(f"no radius reaches cumulative mass 2^{k}")
        return math.exp(optimize.brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500))

    ks = sorted(int(k) for k in ks)
    xs = np.array([solve(k) for k in ks])
    masses = np.array([cumulative(x) if math.isfinite(x) else 1.0 for x in xs])
    annulus = np.full(len(ks), math.nan)
    for i in range(len(ks) - 1):
        if ks[i + 1] == ks[i] + 1:
            annulus[i] = masses[i + 1] - masses[i]
    return pd.DataFrame({"k": ks, "x": xs, "cumulative": masses, "annulus_mass": annulus})


# --------------------------------------------------------------------------- product groups


def _marginal_ball(geom: ProductGeometry, g: Surface, axis: int) -> ComputedProfile:
    """``t ↦ ∫_{B(e_axis, t)} ∫_{G_other} g``."""
    regions = ("ball", "tail") if axis == 1 else ("tail", "ball")
    joint = g.mass(geom, regions)
    zero = np.zeros(1)

    def H(t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float).ravel()
        return joint(t, zero)[:, 0] if axis == 1 else joint(zero, t)[0, :]

    return ComputedProfile(H, g.breakpoints[axis - 1], f"marginal_ball{axis}")


def product_duality_terms(
    geom: ProductGeometry,
    p: float,
    w,
    g: Surface,
    settings: Settings | None = None,
) -> ProductDualityTerms:
    """``I1..I4`` of the product duality bound for product-form ``w = w1 ⊗ w2``.

    I1 = ‖w‖_1^{-1/p} ‖g‖_1
    I2 = ‖w2‖_1^{-1/p} (∫_{G1} (∫_{B(e1,r1(x))} ‖g(t,·)‖_1 dt)^{p'} W1^{-p'} w1 dx)^{1/p'}
    I3 = the same with the axes exchanged
    I4 = (∫∫ (∫∫_{B(e1,r1(x)) x B(e2,r2(y))} g)^{p'} (W1 W2)^{-p'} w1 w2)^{1/p'}

    The prefactors vanish on axes of infinite mass.
    """
    s = settings or current_settings()
    w1, w2 = as_product_weight(w).factors()
    g1_geom, g2_geom = geom.first, geom.second
    zero = np.zeros(1)
    norm_g = float(g.mass(geom, ("tail", "tail"))(zero, zero)[0, 0])
    if norm_g == 0.0:
        return ProductDualityTerms(0.0, 0.0, 0.0, 0.0)
    M1 = math.inf if total_mass_is_infinite(g1_geom, w1, s).infinite else _total(g1_geom, w1)
    M2 = math.inf if total_mass_is_infinite(g2_geom, w2, s).infinite else _total(g2_geom, w2)
    I1 = (M1 * M2) ** (-1.0 / p) * norm_g if math.isfinite(M1 * M2) else 0.0

    def marginal_term(axis: int, other_mass: float) -> float:
        if math.isinf(other_mass):
            return 0.0
        gi, wi = (g1_geom, w1) if axis == 1 else (g2_geom, w2)
        H = _marginal_ball(geom, g, axis)
        value = _ball_functional(gi, p, wi, H, H.breakpoints, s, where=f"I{axis + 1}")
        return other_mass ** (-1.0 / p) * value

    I2 = marginal_term(1, M2)
    I3 = marginal_term(2, M1)
    if g.is_separable:
        f1, f2 = g.factors()
        I4 = duality_rhs(g1_geom, p, w1, f1, s).second * duality_rhs(g2_geom, p, w2, f2, s).second
    else:
        I4 = _joint_ball_functional(geom, p, w1, w2, g, s)
    return ProductDualityTerms(I1, I2, I3, I4)


def _joint_ball_functional(
    geom: ProductGeometry, p: float, w1: RadialWeight, w2: RadialWeight, g: Surface, settings: Settings
) -> float:
    """Tensor log-GL value of ``I4`` for non-separable ``g``; tails beyond the grid are dropped."""
    pp = p / (p - 1.0)
    cells = max(2, settings.cells_per_decade // 2)
    order = max(4, settings.gauss_order // 2)
    rules = []
    for i, wi in ((1, w1), (2, w2)):
        gi = geom.axis(i)
        quad = LogQuadrature(
            settings.t_min, settings.t_max, cells, order, list(g.breakpoints[i - 1]) + list(wi.breakpoints)
        )
        t = quad.nodes.ravel()
        W = _ball(gi, wi)(t)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            weight = quad.weights.ravel() * gi.sigma * t ** (gi.Q - 1.0) * W ** (-pp) * wi(t)
        rules.append((t, np.nan_to_num(weight, nan=0.0, posinf=0.0)))
    (t1, a1), (t2, a2) = rules
    H = np.asarray(g.mass(geom, ("ball", "ball"))(t1, t2), dtype=float)
    with np.errstate(invalid="ignore", over="ignore"):
        values = np.where(H == 0.0, 0.0, H ** pp)
    if np.any(np.isinf(values)):
        raise DivergenceError("I4:product", message="the joint ball mass of g diverges")
    total = float(a1 @ values @ a2)
    return total ** (1.0 / pp)


__all__ = [
    "DualityTerms",
    "ProductDualityTerms",
    "adjoint_criterion_check",
    "duality_lhs_maximize",
    "duality_rhs",
    "dyadic_sequence",
    "product_duality_terms",
    "tail_hardy_check",
]
