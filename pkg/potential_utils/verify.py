"""Empirical side of the boundedness characterizations.

``ratio_maximize`` measures ``‖Tf‖_{L^q(v)} / ‖f‖_{L^p(w)}`` over named
families of decreasing profiles; ``evaluate_theorem`` puts those measurements
next to a theorem's conditions and decides whether the two agree. Growth of
a family trace by a factor of 10 over three decades of the family parameter
is the working proxy for an unbounded operator.

The brute-force oracle integrates the Riesz kernel directly in Cartesian
(``R^1``) or probe-centred polar (``R^2``) coordinates and never touches the
kernel averages used by the operators, so the two can be compared.
"""

from __future__ import annotations

import logging
import math
from typing import Callable, Dict, Iterable, List, Literal, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import integrate

from schemas.report import ConditionReport, OracleRecord, RatioReport, TracePoint, Tristate, Verdict

from .conditions import (
    ExponentPair,
    far_piece_conditions,
    hardy_cone_conditions,
    riesz_conditions,
)
from .errors import ArgumentError, DivergenceError, PreconditionError
from .geometry import GroupGeometry, ProductGeometry, polar_table
from .operators import (
    OperatorParams,
    get_operator,
    kernel_annulus_integral,
    riesz_full,
    riesz_near,
    weighted_hardy_H_alpha,
)
from .product.conditions import product_riesz_conditions, trace_condition
from .product.operators import product_riesz_full, product_riesz_pieces
from .product.surfaces import ProductWeight, SeparableSurface, Surface, as_product_weight
from .quadrature import LogQuadrature
from .radial import (
    RadialProfile,
    RadialWeight,
    StepProfile,
    as_weight,
    constant,
    indicator,
    project_to_decreasing,
)
from .settings import Settings, current_settings

logger = logging.getLogger(__name__)

FAMILY_POINTS = 25
GROWTH_DECADES = 3.0
UNBOUNDED_GROWTH = 10.0
SATURATED_GROWTH = 1.5
RATIO_ASCENT_BUDGET = 24
TRUNCATED_STEPS_PER_DECADE = 8
QUAD_LIMIT = 200

Family = Literal["indicator", "truncated_power", "two_step", "geometric", "all"]
FAMILIES: Tuple[str, ...] = ("indicator", "truncated_power", "two_step", "geometric")
PRODUCT_FAMILIES: Tuple[str, ...] = ("indicator_diagonal", "indicator_axis1", "indicator_axis2")

Operator = Union[str, Callable[[GroupGeometry, OperatorParams, RadialProfile], RadialProfile]]


def _norm_settings(settings: Settings) -> Settings:
    """A coarser rule for norms inside optimization loops."""
    return settings.model_copy(
        update={
            "cells_per_decade": max(4, settings.cells_per_decade // 2),
            "gauss_order": max(4, settings.gauss_order // 2),
        }
    )


def weighted_norm(
    geom: GroupGeometry,
    f: Callable[[np.ndarray], np.ndarray],
    weight: Callable[[np.ndarray], np.ndarray],
    r: float,
    breakpoints: Iterable[float] = (),
    settings: Settings | None = None,
) -> float:
    """``(∫_G f^r weight)^{1/r}``, ``inf`` when a tail diverges."""

    def density(s: np.ndarray) -> np.ndarray:
        fs = np.asarray(f(s), dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return np.where(fs == 0.0, 0.0, fs ** r * np.asarray(weight(s), dtype=float))

    total = polar_table(geom, density, breakpoints, settings).total
    return total ** (1.0 / r) if math.isfinite(total) else math.inf


# --------------------------------------------------------------------------- test families


def stepped_truncated_power(gamma: float, height: float, radius: float = 1.0) -> StepProfile:
    """Step minorant of ``min(s^-γ, height) χ_(0, radius)`` with 8 steps per decade."""
    knee = height ** (-1.0 / gamma) if gamma > 0 else radius
    if knee >= radius:
        return StepProfile([radius], [height])
    n = max(1, math.ceil(math.log10(radius / knee) * TRUNCATED_STEPS_PER_DECADE))
    grid = np.geomspace(knee, radius, n + 1)
    values = np.concatenate([[height], grid[1:] ** (-gamma)])
    return StepProfile(grid, values)


def family_members(family: str, geom: GroupGeometry, p: float) -> Tuple[np.ndarray, List[RadialProfile]]:
    """Parameters and members of a named family of decreasing profiles."""
    radii = np.geomspace(1e-3, 1e3, FAMILY_POINTS)
    if family == "indicator":
        return radii, [indicator(s) for s in radii]
    if family == "truncated_power":
        heights = np.geomspace(1.0, 1e6, FAMILY_POINTS)
        gamma = geom.Q / (2.0 * p)
        return heights, [stepped_truncated_power(gamma, T) for T in heights]
    if family == "two_step":
        return radii, [StepProfile([s, 2.0 * s], [1.0, 0.5]) for s in radii]
    if family == "geometric":
        j = np.arange(8)
        return radii, [StepProfile(s * 2.0 ** j, 0.5 ** j) for s in radii]
    raise ArgumentError(f"unknown family {family!r}; known: {FAMILIES}")


# --------------------------------------------------------------------------- trace analysis


def trace_growth(parameters: Sequence[float], ratios: Sequence[float]) -> float:
    """Largest ratio growth over three decades toward either end of the parameter range."""
    x = np.log10(np.asarray(parameters, dtype=float))
    r = np.asarray(ratios, dtype=float)
    if np.any(np.isinf(r)):
        return math.inf
    keep = r > 0
    x, r = x[keep], r[keep]
    if len(x) < 4:
        return math.nan
    growth = 0.0
    for end, direction in ((0, 1.0), (len(x) - 1, -1.0)):
        inner = int(np.argmin(np.abs(x - (x[end] + direction * GROWTH_DECADES))))
        if inner != end:
            growth = max(growth, r[end] / r[inner])
    return growth


def unbounded_verdict(trace: Sequence[TracePoint]) -> Tristate:
    growths = []
    for family in sorted({pt.family for pt in trace}):
        pts = [pt for pt in trace if pt.family == family]
        growths.append(trace_growth([pt.parameter for pt in pts], [pt.ratio for pt in pts]))
    growths = [g for g in growths if not math.isnan(g)]
    if not growths:
        return "indeterminate"
    worst = max(growths)
    if worst >= UNBOUNDED_GROWTH:
        return "true"
    if worst <= SATURATED_GROWTH:
        return "false"
    return "indeterminate"


# --------------------------------------------------------------------------- ratio maximization


def _ratio(
    geom: GroupGeometry,
    op,
    params: OperatorParams,
    f: RadialProfile,
    w: RadialWeight,
    v: RadialWeight,
    pair: ExponentPair,
    settings: Settings,
) -> float:
    nf = weighted_norm(geom, f, w, pair.p, list(f.breakpoints) + list(w.breakpoints), settings)
    if not (0.0 < nf < math.inf):
        raise DivergenceError("domain", message="‖f‖_{L^p(w)} is not finite and positive")
    image = op(geom, params, f)
    nt = weighted_norm(geom, image, v, pair.q, list(image.breakpoints) + list(v.breakpoints), settings)
    return nt / nf


def _refine(
    geom: GroupGeometry,
    op,
    params: OperatorParams,
    start: StepProfile,
    best: float,
    w: RadialWeight,
    v: RadialWeight,
    pair: ExponentPair,
    settings: Settings,
    rng: np.random.Generator,
    budget: int,
) -> Tuple[StepProfile, float, int]:
    """Random multiplicative moves on step heights, each projected back onto the cone."""
    grid = np.unique(np.concatenate([start.grid, np.geomspace(start.grid[0] / 100.0, start.grid[-1] * 10.0, 12)]))
    left = np.concatenate([[0.0], grid[:-1]])
    current = StepProfile(grid, start(left), start.tail)
    evaluations = 0
    for _ in range(budget):
        j = int(rng.integers(len(grid)))
        trial = current.values.copy()
        trial[j] *= math.exp(rng.normal(0.0, 0.5))
        candidate = project_to_decreasing(StepProfile(grid, trial, current.tail), geom).as_step()
        evaluations += 1
        try:
            value = _ratio(geom, op, params, candidate, w, v, pair, settings)
        except (DivergenceError, PreconditionError):
            continue
        if value > best:
            current, best = candidate, value
    return current, best, evaluations


def ratio_maximize(
    geom: GroupGeometry,
    pair: ExponentPair,
    operator: Operator,
    w: RadialProfile | RadialWeight,
    v: RadialProfile | RadialWeight,
    family: Family = "all",
    budget: Optional[int] = None,
    params: Optional[OperatorParams] = None,
    seed: Optional[int] = None,
    settings: Settings | None = None,
) -> RatioReport:
    """Best ``‖Tf‖_{L^q(v)} / ‖f‖_{L^p(w)}`` over the named families plus an ascent refinement.

    Members whose ``L^p(w)`` norm diverges, or on which the operator itself
    diverges, are skipped and listed. A finite member whose image has
    infinite ``L^q(v)`` norm contributes an infinite ratio.
    """
    s = settings or current_settings()
    ns = _norm_settings(s)
    op = get_operator(operator) if isinstance(operator, str) else operator
    params = params or OperatorParams()
    w = as_weight(w)
    v = as_weight(v, allow_vanishing=True)
    budget = RATIO_ASCENT_BUDGET if budget is None else int(budget)
    rng = np.random.default_rng(s.seed if seed is None else seed)
    families = FAMILIES if family == "all" else (family,)

    trace: List[TracePoint] = []
    skipped: List[str] = []
    best, witness = 0.0, None
    evaluations = 0
    for name in families:
        parameters, members = family_members(name, geom, pair.p)
        for x, f in zip(parameters, members):
            evaluations += 1
            try:
                r = _ratio(geom, op, params, f, w, v, pair, ns)
            except (DivergenceError, PreconditionError) as exc:
                logger.warning("skipping %s member %.4g: %s", name, x, exc)
                skipped.append(f"{name}({x:.4g}): {exc}")
                continue
            trace.append(TracePoint(family=name, parameter=float(x), ratio=r))
            if r > best or witness is None:
                best, witness = r, f

    if budget > 0 and witness is not None and math.isfinite(best) and witness.as_step() is not None:
        refined, value, used = _refine(geom, op, params, witness.as_step(), best, w, v, pair, ns, rng, budget)
        evaluations += used
        if value > best:
            best, witness = value, refined

    image_t, image_value = [], []
    if witness is not None:
        t, values = op(geom, params, witness).on_grid(s)
        image_t, image_value = t.tolist(), values.tolist()

    return RatioReport(
        best_ratio=best,
        witness=witness.to_record() if witness is not None else None,
        image_t=image_t,
        image_value=image_value,
        family_trace=trace,
        skipped=skipped,
        unbounded=unbounded_verdict(trace),
        evaluations=evaluations,
    )


def _product_ratio(
    geom: ProductGeometry,
    alphas: Tuple[float, float],
    w: ProductWeight,
    v: ProductWeight,
    pair: ExponentPair,
    a1: float,
    a2: float,
    settings: Settings,
) -> float:
    """Ratio for ``f = χ_{B(e1,a1)} ⊗ χ_{B(e2,a2)}`` and the product Riesz potential."""
    w1, w2 = w.factors()
    g1, g2 = geom.first, geom.second
    nf = float(g1.sigma * w1.moment(g1.Q - 1.0, 0.0, a1) * g2.sigma * w2.moment(g2.Q - 1.0, 0.0, a2))
    nf = nf ** (1.0 / pair.p)
    if not (0.0 < nf < math.inf):
        raise DivergenceError("domain", message="‖f‖_{L^p(w)} is not finite and positive")
    if v.is_separable:
        v1, v2 = v.factors()
        A = riesz_full(g1, OperatorParams(alpha=alphas[0]), indicator(a1))
        B = riesz_full(g2, OperatorParams(alpha=alphas[1]), indicator(a2))
        n1 = weighted_norm(g1, A, v1, pair.q, list(A.breakpoints) + list(v1.breakpoints), settings)
        n2 = weighted_norm(g2, B, v2, pair.q, list(B.breakpoints) + list(v2.breakpoints), settings)
        return n1 * n2 / nf
    image = product_riesz_full(
        geom, OperatorParams(alpha1=alphas[0], alpha2=alphas[1]), SeparableSurface(indicator(a1), indicator(a2))
    )
    rules = []
    for i, gi in ((1, g1), (2, g2)):
        quad = LogQuadrature(
            settings.t_min,
            settings.t_max,
            settings.cells_per_decade,
            settings.gauss_order,
            list(image.breakpoints[i - 1]) + list(v.breakpoints[i - 1]),
        )
        t = quad.nodes.ravel()
        rules.append((t, quad.weights.ravel() * gi.sigma * t ** (gi.Q - 1.0)))
    (t1, c1), (t2, c2) = rules
    values = np.asarray(image(t1, t2), dtype=float)
    with np.errstate(invalid="ignore", over="ignore"):
        density = np.where(values == 0.0, 0.0, values ** pair.q * np.asarray(v(t1, t2), dtype=float))
    return float(c1 @ density @ c2) ** (1.0 / pair.q) / nf


def product_ratio_maximize(
    geom: ProductGeometry,
    pair: ExponentPair,
    alpha1: float,
    alpha2: float,
    w,
    v,
    settings: Settings | None = None,
) -> RatioReport:
    """``ratio_maximize`` for ``I_{α1,α2}`` over separable ball indicators.

    Families: ``a1 = a2 = s``, ``a1 = s`` with ``a2 = 1``, and ``a2 = s`` with ``a1 = 1``.
    """
    s = settings or current_settings()
    ns = _norm_settings(s)
    w = as_product_weight(w)
    v = as_product_weight(v, allow_vanishing=True)
    radii = np.geomspace(1e-3, 1e3, FAMILY_POINTS)
    trace: List[TracePoint] = []
    skipped: List[str] = []
    best, witness = 0.0, None
    for name in PRODUCT_FAMILIES:
        for x in radii:
            a1, a2 = {"indicator_diagonal": (x, x), "indicator_axis1": (x, 1.0), "indicator_axis2": (1.0, x)}[name]
            try:
                r = _product_ratio(geom, (alpha1, alpha2), w, v, pair, a1, a2, ns)
            except (DivergenceError, PreconditionError) as exc:
                logger.warning("skipping %s member %.4g: %s", name, x, exc)
                skipped.append(f"{name}({x:.4g}): {exc}")
                continue
            trace.append(TracePoint(family=name, parameter=float(x), ratio=r))
            if r > best or witness is None:
                best, witness = r, SeparableSurface(indicator(a1), indicator(a2))
    return RatioReport(
        best_ratio=best,
        witness=witness.to_record() if witness is not None else None,
        family_trace=trace,
        skipped=skipped,
        unbounded=unbounded_verdict(trace),
        evaluations=len(PRODUCT_FAMILIES) * len(radii),
    )


def trace_necessity_ratio(
    geom: ProductGeometry,
    pair: ExponentPair,
    alpha1: float,
    alpha2: float,
    v,
    a1: float,
    a2: float,
    settings: Settings | None = None,
) -> float:
    """``‖I_{α1,α2} f‖_{L^q(v)} / ‖f‖_{L^p}`` for ``f = χ_{B(e1,a1)} ⊗ χ_{B(e2,a2)}``."""
    s = settings or current_settings()
    ones = ProductWeight.product(constant(1.0), constant(1.0))
    v = as_product_weight(v, allow_vanishing=True)
    return _product_ratio(geom, (alpha1, alpha2), ones, v, pair, a1, a2, s)


def trace_dominance_constant(
    geom: ProductGeometry,
    pair: ExponentPair,
    alpha1: float,
    alpha2: float,
    v,
    settings: Settings | None = None,
) -> float:
    """``max(A_1, ..., A_9) / B`` with ``w ≡ 1``, the constant of ``max A_i <= C B``.

    ``nan`` when ``B`` is infinite, since every ``C`` then works.
    """
    s = settings or current_settings()
    ones = ProductWeight.product(constant(1.0), constant(1.0))
    v = as_product_weight(v, allow_vanishing=True)
    bound = trace_condition(geom, pair, alpha1, alpha2, v, s).value
    worst = max(r.value for r in product_riesz_conditions(geom, pair, alpha1, alpha2, ones, v, s))
    logger.debug("trace dominance: max A = %.6g, B = %.6g", worst, bound)
    if math.isinf(bound):
        return math.nan
    if bound == 0.0:
        return 0.0 if worst == 0.0 else math.inf
    return worst / bound


# --------------------------------------------------------------------------- theorem consistency


Theorem = Literal["riesz", "hardy_cone", "far_piece", "product_riesz", "trace"]


class TheoremOutcome(NamedTuple):
    conditions: List[ConditionReport]
    ratio: RatioReport
    verdict: Verdict


def consistency_verdict(
    conditions: Sequence[ConditionReport],
    ratio: RatioReport,
    sufficient: Optional[Sequence[str]] = None,
    necessary: Optional[Sequence[str]] = None,
    branch: Optional[str] = None,
) -> Verdict:
    """Compare condition verdicts with the measured ratio behaviour.

    Finite sufficient conditions must come with a bounded trace and an
    infinite necessary condition with an unbounded one; by default every
    condition is both.
    """
    finite: Dict[str, Tristate] = {c.condition: c.finite for c in conditions}
    sufficient = list(finite) if sufficient is None else list(sufficient)
    necessary = list(finite) if necessary is None else list(necessary)
    bounded: Tristate = {"true": "false", "false": "true", "indeterminate": "indeterminate"}[ratio.unbounded]
    suff_all_finite = all(finite[c] == "true" for c in sufficient)
    nec_some_infinite = any(finite[c] == "false" for c in necessary)
    relevant = set(sufficient) | set(necessary)
    undecided = any(finite[c] == "indeterminate" for c in relevant)
    undecided = undecided or (not suff_all_finite and not nec_some_infinite)
    if suff_all_finite or nec_some_infinite:
        undecided = undecided or bounded == "indeterminate"
    consistent = undecided or (
        (not suff_all_finite or bounded == "true") and (not nec_some_infinite or bounded == "false")
    )
    return Verdict(
        conditions_finite=finite,
        ratio_bounded=bounded,
        consistent=consistent,
        indeterminate=undecided,
        hypothesis_branch=branch,
    )


def _branch(conditions: Sequence[ConditionReport]) -> Optional[str]:
    for c in conditions:
        for note in c.diagnostics.notes:
            if note.startswith("doubling branch: "):
                return note.split(": ", 1)[1]
    return None


def evaluate_theorem(
    theorem: Theorem,
    geom: GroupGeometry | ProductGeometry,
    pair: ExponentPair,
    w,
    v,
    alpha: Optional[float] = None,
    alpha1: Optional[float] = None,
    alpha2: Optional[float] = None,
    family: Family = "all",
    budget: Optional[int] = None,
    settings: Settings | None = None,
) -> TheoremOutcome:
    """Conditions, measured ratios and their verdict for one theorem instance."""
    s = settings or current_settings()
    sufficient = necessary = None
    if theorem == "riesz":
        conditions = riesz_conditions(geom, pair, alpha, w, v, s)
        ratio = ratio_maximize(geom, pair, "riesz", w, v, family, budget, OperatorParams(alpha=alpha), settings=s)
    elif theorem == "hardy_cone":
        conditions = hardy_cone_conditions(geom, pair, w, v, s)
        ratio = ratio_maximize(geom, pair, "hardy", w, v, family, budget, settings=s)
    elif theorem == "far_piece":
        conditions = [
            far_piece_conditions(geom, pair, alpha, w, v, "sufficient", s),
            far_piece_conditions(geom, pair, alpha, w, v, "necessary", s),
        ]
        sufficient, necessary = ["far_piece_sufficient"], ["far_piece_necessary"]
        ratio = ratio_maximize(geom, pair, "riesz_far", w, v, family, budget, OperatorParams(alpha=alpha), settings=s)
    elif theorem == "product_riesz":
        conditions = product_riesz_conditions(geom, pair, alpha1, alpha2, w, v, s)
        ratio = product_ratio_maximize(geom, pair, alpha1, alpha2, w, v, s)
    elif theorem == "trace":
        conditions = [trace_condition(geom, pair, alpha1, alpha2, v, s)]
        ones = ProductWeight.product(constant(1.0), constant(1.0))
        ratio = product_ratio_maximize(geom, pair, alpha1, alpha2, ones, v, s)
    else:
        raise ArgumentError(f"unknown theorem {theorem!r}")
    verdict = consistency_verdict(conditions, ratio, sufficient, necessary, _branch(conditions))
    if not verdict.consistent:
        logger.warning("%s: conditions %s disagree with ratio trace (bounded=%s)", theorem, verdict.conditions_finite, verdict.ratio_bounded)
    return TheoremOutcome(conditions, ratio, verdict)


def theorem_consistency_sweep(
    theorem: Theorem,
    geom: GroupGeometry | ProductGeometry,
    pair: ExponentPair,
    w,
    v,
    **kwargs,
) -> Verdict:
    return evaluate_theorem(theorem, geom, pair, w, v, **kwargs).verdict


# --------------------------------------------------------------------------- brute-force oracle


_BANDS = {
    "riesz": (0.0, math.inf),
    "riesz_near": (0.0, 2.0),
    "riesz_far": (2.0, math.inf),
}
_PRODUCT_PIECES = {
    "product_riesz": ("riesz", "riesz"),
    "product_JJ": ("riesz_near", "riesz_near"),
    "product_JS": ("riesz_near", "riesz_far"),
    "product_SJ": ("riesz_far", "riesz_near"),
    "product_SS": ("riesz_far", "riesz_far"),
}


def _in_band(radius: float, lo: float, hi: float) -> bool:
    return lo <= radius < hi


def _oracle_line(f: RadialProfile, alpha: float, R: float, lo: float, hi: float) -> float:
    """``∫_{lo <= |y| < hi} f(|y|) |R - y|^(α-1) dy`` on the real line."""
    cuts = {0.0, R, R - 1.0, R + 1.0}
    for b in list(f.breakpoints) + [x for x in (lo, hi) if 0 < x < math.inf]:
        cuts.update((b, -b))
    cuts = sorted(cuts)

    def plain(y: float) -> float:
        d = abs(R - y)
        return float(f(np.asarray(abs(y)))) * d ** (alpha - 1.0) if d > 0 else 0.0

    def smooth(y: float) -> float:
        return float(f(np.asarray(abs(y))))

    total = 0.0
    segments = [(-math.inf, cuts[0])] + list(zip(cuts[:-1], cuts[1:])) + [(cuts[-1], math.inf)]
    for a, b in segments:
        mid = (a + b) / 2.0 if math.isfinite(a) and math.isfinite(b) else (b - 1.0 if math.isinf(a) else a + 1.0)
        if not _in_band(abs(mid), lo, hi):
            continue
        if alpha < 1.0 and (a == R or b == R):
            wvar = (alpha - 1.0, 0.0) if a == R else (0.0, alpha - 1.0)
            val, _ = integrate.quad(smooth, a, b, weight="alg", wvar=wvar, limit=QUAD_LIMIT)
        else:
            val, _ = integrate.quad(plain, a, b, limit=QUAD_LIMIT)
        total += val
    return total


def _oracle_plane(f: RadialProfile, alpha: float, R: float, lo: float, hi: float) -> float:
    """Same integral on ``R^2`` in polar coordinates centred at the probe ``(R, 0)``."""
    radii = [b for b in list(f.breakpoints) + [x for x in (lo, hi) if 0 < x < math.inf]]

    def y_norm(rho: float, c: float) -> float:
        return math.sqrt(max(R * R + 2.0 * R * rho * c + rho * rho, 0.0))

    def inner(theta: float) -> float:
        c, sn = math.cos(theta), math.sin(theta)
        cuts = {0.0, 1.0}
        for b in radii:
            disc = b * b - (R * sn) ** 2
            if disc >= 0:
                for root in (-R * c - math.sqrt(disc), -R * c + math.sqrt(disc)):
                    if root > 0:
                        cuts.add(root)
        cuts = sorted(cuts)
        segments = list(zip(cuts[:-1], cuts[1:])) + [(cuts[-1], math.inf)]
        total = 0.0
        for a, b in segments:
            mid = (a + b) / 2.0 if math.isfinite(b) else a + 1.0
            if not _in_band(y_norm(mid, c), lo, hi):
                continue

            def smooth(rho: float) -> float:
                return float(f(np.asarray(y_norm(rho, c))))

            if a == 0.0 and alpha < 1.0:
                val, _ = integrate.quad(smooth, a, b, weight="alg", wvar=(alpha - 1.0, 0.0), limit=QUAD_LIMIT)
            else:
                val, _ = integrate.quad(lambda rho: smooth(rho) * rho ** (alpha - 1.0), a, b, limit=QUAD_LIMIT)
            total += val
        return total

    points = []
    for b in radii:
        if 0 < b < R:
            points += [math.asin(b / R), math.pi - math.asin(b / R)]
    value, _ = integrate.quad(inner, 0.0, math.pi, points=sorted(points) or None, limit=QUAD_LIMIT)
    return 2.0 * value


def _oracle_point(geom: GroupGeometry, band: str, alpha: float, f: RadialProfile, R: float) -> float:
    if R < 0 or (R == 0 and band != "riesz"):
        return math.nan
    lo, hi = (c * geom.c0 if math.isfinite(c) else c for c in _BANDS[band])
    lo_r = lo * R
    hi_r = hi * R if math.isfinite(hi) else math.inf
    if geom.euclidean_dim == 1:
        return _oracle_line(f, alpha, R, lo_r, hi_r)
    return _oracle_plane(f, alpha, R, lo_r, hi_r)


def brute_force_oracle(
    geom: GroupGeometry | ProductGeometry,
    operator: str,
    params: OperatorParams,
    f: RadialProfile | Surface,
    probes: Sequence,
) -> np.ndarray:
    """Direct quadrature of the Riesz kernel at each probe; ``nan`` marks a skipped probe.

    Single groups take radii as probes and ``operator`` in ``riesz``,
    ``riesz_near``, ``riesz_far``. Products take ``(x, y)`` radius pairs,
    a separable ``f`` and ``product_riesz`` or ``product_JJ/JS/SJ/SS``.
    """
    if isinstance(geom, ProductGeometry):
        if operator not in _PRODUCT_PIECES:
            raise ArgumentError(f"unknown product operator {operator!r}; known: {sorted(_PRODUCT_PIECES)}")
        for g in (geom.first, geom.second):
            if g.euclidean_dim not in (1, 2):
                raise ArgumentError("the brute-force oracle covers R^1 and R^2 only")
        f1, f2 = f.factors()
        b1, b2 = _PRODUCT_PIECES[operator]
        a1 = params.order(geom.first, "alpha1")
        a2 = params.order(geom.second, "alpha2")
        return np.array(
            [
                _oracle_point(geom.first, b1, a1, f1, float(x)) * _oracle_point(geom.second, b2, a2, f2, float(y))
                for x, y in probes
            ]
        )
    if operator not in _BANDS:
        raise ArgumentError(f"unknown operator {operator!r}; known: {sorted(_BANDS)}")
    if geom.euclidean_dim not in (1, 2):
        raise ArgumentError("the brute-force oracle covers R^1 and R^2 only")
    alpha = params.order(geom)
    return np.array([_oracle_point(geom, operator, alpha, f, float(x)) for x in probes])


def oracle_comparison(
    geom: GroupGeometry | ProductGeometry,
    operator: str,
    params: OperatorParams,
    f: RadialProfile | Surface,
    probes: Sequence,
) -> List[OracleRecord]:
    """Operator values next to the oracle at every probe the oracle does not skip."""
    oracle = brute_force_oracle(geom, operator, params, f, probes)
    if isinstance(geom, ProductGeometry):
        if operator == "product_riesz":
            image = product_riesz_full(geom, params, f)
        else:
            image = product_riesz_pieces(geom, params, operator.split("_", 1)[1], f)
        values = [float(image(np.array([x]), np.array([y]))[0, 0]) for x, y in probes]
        points = [[float(x), float(y)] for x, y in probes]
    else:
        image = get_operator(operator)(geom, params, f)
        values = [float(image(np.array([x]))[0]) for x in probes]
        points = [[float(x)] for x in probes]
    records = []
    for point, value, ref in zip(points, values, oracle):
        if math.isnan(ref):
            continue
        error = abs(value - ref) / abs(ref) if ref != 0 else abs(value)
        records.append(OracleRecord(probe=point, value=value, oracle=float(ref), relative_error=error))
    return records


# --------------------------------------------------------------------------- empirical constants


def kernel_bound_constant(geom: GroupGeometry, alpha: float, radii: Iterable[float]) -> float:
    """``max I(x, y) / r(x y⁻¹)^α`` over collinear pairs with ``r(y) <= r(x)/2``."""
    radii = sorted(float(r) for r in radii)
    worst = 0.0
    for rx in radii:
        for ry in radii:
            if ry > rx / 2.0:
                continue
            value = kernel_annulus_integral(geom, alpha, rx, ry)
            worst = max(worst, value / (rx - ry) ** alpha)
    return worst


def near_hardy_equivalence_constant(
    geom: GroupGeometry,
    alpha: float,
    profiles: Iterable[RadialProfile],
    radii: Optional[Iterable[float]] = None,
    settings: Settings | None = None,
) -> float:
    """Smallest ``C`` with ``1/C <= J_α f / H_α f <= C`` over the given profiles and radii.

    Without ``radii`` both images are sampled on the output grid.
    """
    params = OperatorParams(alpha=alpha)
    grid = None if radii is None else np.asarray(list(radii), dtype=float)
    worst = 1.0
    for f in profiles:
        image = riesz_near(geom, params, f)
        if grid is None:
            t, near = image.on_grid(settings)
        else:
            t, near = grid, np.asarray(image(grid), dtype=float)
        hardy = np.asarray(weighted_hardy_H_alpha(geom, params, f)(t), dtype=float)
        keep = (near > 0) & (hardy > 0)
        if np.any(keep):
            ratio = near[keep] / hardy[keep]
            worst = max(worst, float(np.max(ratio)), float(np.max(1.0 / ratio)))
    return worst


__all__ = [
    "FAMILIES",
    "TheoremOutcome",
    "brute_force_oracle",
    "consistency_verdict",
    "evaluate_theorem",
    "family_members",
    "kernel_bound_constant",
    "near_hardy_equivalence_constant",
    "oracle_comparison",
    "product_ratio_maximize",
    "ratio_maximize",
    "stepped_truncated_power",
    "theorem_consistency_sweep",
    "trace_growth",
    "trace_dominance_constant",
    "trace_necessity_ratio",
    "unbounded_verdict",
    "weighted_norm",
]
