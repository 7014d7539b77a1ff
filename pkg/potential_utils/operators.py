"""Radial Hardy-type operators and the pieces of the Riesz potential.

All operators act on radial profiles and return radial profiles. For the
Riesz pieces on ``R^n`` the angular integration is done once through the
kernel average ``k(R, s)``, so that

    I_α f(R) = ∫_0^∞ f(s) s^(n-1) k(R, s) ds

and the near/far pieces restrict ``s`` to ``[0, 2 c0 R)`` and ``[2 c0 R, ∞)``.
On ``R^1`` step profiles are integrated in closed form cell by cell; other
inputs go through adaptive quadrature with the algebraic endpoint weight
at the diagonal ``s = R``.
"""

from __future__ import annotations

import logging
import math
from typing import Callable, Dict, Iterable, Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field
from scipy import integrate

from .errors import ArgumentError, DivergenceError, PreconditionError
from .geometry import GroupGeometry, euclidean_kernel_average, polar_table
from .radial import ComputedProfile, RadialProfile, StepProfile, _weighted_sum
from .settings import Settings

logger = logging.getLogger(__name__)

QUAD_LIMIT = 200


class OperatorParams(BaseModel):
    """Dilation factors and orders shared by the operators."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    a: float = Field(default=1.0, gt=0)
    b: float = Field(default=1.0, gt=0)
    alpha: Optional[float] = Field(default=None, gt=0)
    alpha1: Optional[float] = Field(default=None, gt=0)
    alpha2: Optional[float] = Field(default=None, gt=0)

    def order(self, geom: GroupGeometry, which: str = "alpha") -> float:
        value = getattr(self, which)
        if value is None:
            raise ArgumentError(f"operator needs {which}")
        if not value < geom.Q:
            raise ArgumentError(f"{which}={value} must lie in (0, Q={geom.Q:g})")
        return float(value)


def _check_origin(geom: GroupGeometry, f: RadialProfile) -> None:
    if np.isinf(f.moment(geom.Q - 1.0, 0.0, 1.0)):
        raise DivergenceError("origin", message="input is not integrable near the origin")


def _check_infinity(f: RadialProfile, k: float) -> None:
    if np.isinf(f.moment(k, 1.0, math.inf)):
        raise DivergenceError("infinity", exponent=k, message="input decays too slowly at infinity")


def _scaled_breakpoints(f: RadialProfile, factors: Iterable[float]) -> Tuple[float, ...]:
    return tuple(b * c for b in f.breakpoints for c in factors)


# --------------------------------------------------------------------------- Hardy family


def hardy(geom: GroupGeometry, params: OperatorParams, f: RadialProfile) -> ComputedProfile:
    """``H^a f(x) = ∫_{B(e, a r(x))} f``."""
    _check_origin(geom, f)
    a, sigma, q1 = params.a, geom.sigma, geom.Q - 1.0
    return ComputedProfile(
        lambda t: sigma * f.moment(q1, 0.0, a * t),
        _scaled_breakpoints(f, (1.0 / a,)),
        f"hardy(a={a:g})",
    )


def hardy_tail(geom: GroupGeometry, params: OperatorParams, f: RadialProfile) -> ComputedProfile:
    """``H̃^a f(x) = ∫_{G \\ B(e, a r(x))} f``."""
    _check_infinity(f, geom.Q - 1.0)
    a, sigma, q1 = params.a, geom.sigma, geom.Q - 1.0
    return ComputedProfile(
        lambda t: sigma * f.moment(q1, a * t, math.inf),
        _scaled_breakpoints(f, (1.0 / a,)),
        f"hardy_tail(a={a:g})",
    )


def weighted_hardy_H_alpha(geom: GroupGeometry, params: OperatorParams, f: RadialProfile) -> ComputedProfile:
    """``H_α f(x) = r(x)^(α-Q) ∫_{B(e, r(x))} f``."""
    alpha = params.order(geom)
    _check_origin(geom, f)
    sigma, q1, e = geom.sigma, geom.Q - 1.0, alpha - geom.Q
    return ComputedProfile(
        lambda t: t ** e * sigma * f.moment(q1, 0.0, t),
        f.breakpoints,
        f"weighted_hardy(alpha={alpha:g})",
    )


def hardy_dual_weighted(geom: GroupGeometry, params: OperatorParams, f: RadialProfile) -> ComputedProfile:
    """``H*_α f(x) = ∫_{G \\ B(e, r(x))} f(y) r(y)^(α-Q) dy``."""
    alpha = params.order(geom)
    _check_infinity(f, alpha - 1.0)
    sigma = geom.sigma
    return ComputedProfile(
        lambda t: sigma * f.moment(alpha - 1.0, t, math.inf),
        f.breakpoints,
        f"hardy_dual(alpha={alpha:g})",
    )


# --------------------------------------------------------------------------- kernel integrals


def _pow_increment(y: np.ndarray, d: np.ndarray, alpha: float) -> np.ndarray:
    """``(y + d)^α - y^α`` for ``y, d >= 0`` without cancellation."""
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        stable = y ** alpha * np.expm1(alpha * np.log1p(d / y))
        out = np.where(y > 0, stable, d ** alpha)
    return np.where(d > 0, out, 0.0)


def kernel_cell_integral_1d(R, a, b, alpha: float) -> np.ndarray:
    """``∫_a^b (|R - s|^(α-1) + (R + s)^(α-1)) ds`` on ``R^1``, broadcasting ``R, a, b``."""
    R, a, b = np.broadcast_arrays(
        np.asarray(R, dtype=float), np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    )
    valid = b > a
    lo_end = np.minimum(b, R)
    hi_start = np.maximum(a, R)
    left = np.where(a < R, _pow_increment(R - lo_end, lo_end - a, alpha), 0.0)
    right = np.where(b > R, _pow_increment(hi_start - R, b - hi_start, alpha), 0.0)
    shift = _pow_increment(R + a, b - a, alpha)
    return np.where(valid, (left + right + shift) / alpha, 0.0)


def _radial_kernel_quad(
    geom: GroupGeometry,
    alpha: float,
    f: Callable[[np.ndarray], np.ndarray],
    breakpoints: Tuple[float, ...],
    R: float,
    lo: float,
    hi: float,
) -> float:
    """``∫_lo^hi f(s) s^(n-1) k(R, s) ds`` by adaptive quadrature split at the diagonal."""
    if hi <= lo:
        return 0.0
    n = geom.euclidean_dim
    n1 = float(n - 1)

    def kern(s: float) -> float:
        return float(euclidean_kernel_average(geom, R, s, alpha))

    def plain(s: float) -> float:
        if s == R:
            return 0.0
        return float(f(np.asarray(s))) * s ** n1 * kern(s)

    cuts = sorted({lo, hi, *[b for b in breakpoints if lo < b < hi]})
    singular = alpha < 1.0 and lo < R < hi
    if lo < R < hi:
        cuts = sorted(set(cuts) | {R})
    total = 0.0
    for x0, x1 in zip(cuts[:-1], cuts[1:]):
        if singular and (x0 == R or x1 == R) and math.isfinite(x1):
            wvar = (alpha - 1.0, 0.0) if x0 == R else (0.0, alpha - 1.0)

            def smooth(s: float) -> float:
                d = abs(R - s)
                if d == 0.0:
                    d = 1e-300
                return plain(s) / d ** (alpha - 1.0) if s != R else 0.0

            val, _ = integrate.quad(smooth, x0, x1, weight="alg", wvar=wvar, limit=QUAD_LIMIT)
        else:
            val, _ = integrate.quad(plain, x0, x1, limit=QUAD_LIMIT)
        total += val
    return total


def _step_band_1d(step: StepProfile, alpha: float, R: np.ndarray, lo_factor: float, hi_factor: float) -> np.ndarray:
    left, right, values = step.cells
    lo = lo_factor * R[:, None]
    hi = hi_factor * R[:, None] if math.isfinite(hi_factor) else np.full_like(lo, math.inf)
    a = np.maximum(left[None, :], lo)
    b = np.minimum(right[None, :], hi)
    pieces = kernel_cell_integral_1d(R[:, None], a, b, alpha)
    return _weighted_sum(values, pieces)


def _band_operator(
    geom: GroupGeometry,
    alpha: float,
    f: RadialProfile,
    lo_factor: float,
    hi_factor: float,
    label: str,
) -> ComputedProfile:
    """``R ↦ ∫_{lo·R}^{hi·R} f(s) s^(n-1) k(R, s) ds``."""
    if not geom.is_euclidean:
        raise ArgumentError("Riesz kernel averages are available for Euclidean geometries only")
    if not (0.0 < alpha < geom.Q):
        raise ArgumentError(f"alpha must lie in (0, Q={geom.Q:g}), got {alpha}")
    n = geom.euclidean_dim
    if lo_factor == 0.0:
        _check_origin(geom, f)
    if math.isinf(hi_factor):
        _check_infinity(f, alpha - 1.0)
    step = f.as_step()
    bps = f.breakpoints

    if step is not None and n == 1:

        def evaluate(t: np.ndarray) -> np.ndarray:
            flat = np.asarray(t, dtype=float).ravel()
            return _step_band_1d(step, alpha, flat, lo_factor, hi_factor).reshape(np.shape(t))

    else:

        def single(r: float) -> float:
            if r < 0:
                return math.nan
            if r == 0:
                # k(0, s) = σ s^(α-n): the band is empty or all of (0, ∞)
                if math.isfinite(hi_factor):
                    return 0.0
                return geom.sigma * float(f.moment(alpha - 1.0, 0.0, math.inf))
            hi = hi_factor * r if math.isfinite(hi_factor) else math.inf
            return _radial_kernel_quad(geom, alpha, f, bps, r, lo_factor * r, hi)

        vec = np.vectorize(single, otypes=[float])

        def evaluate(t: np.ndarray) -> np.ndarray:
            return vec(np.asarray(t, dtype=float))

    factors = [1.0] + [1.0 / c for c in (lo_factor, hi_factor) if c > 0 and math.isfinite(c)]
    return ComputedProfile(evaluate, _scaled_breakpoints(f, factors), label)


# --------------------------------------------------------------------------- Riesz pieces


def riesz_near(geom: GroupGeometry, params: OperatorParams, f: RadialProfile) -> ComputedProfile:
    """``J_α f(x) = ∫_{B(e, 2 c0 r(x))} f(y) r(xy⁻¹)^(α-Q) dy`` for decreasing ``f``."""
    if not f.is_decreasing():
        raise PreconditionError("decreasing", "the near piece is defined on the decreasing cone")
    alpha = params.order(geom)
    return _band_operator(geom, alpha, f, 0.0, 2.0 * geom.c0, f"riesz_near(alpha={alpha:g})")


def riesz_far(geom: GroupGeometry, params: OperatorParams, f: RadialProfile) -> ComputedProfile:
    """``S_α f(x) = ∫_{G \\ B(e, 2 c0 r(x))} f(y) r(xy⁻¹)^(α-Q) dy``."""
    alpha = params.order(geom)
    return _band_operator(geom, alpha, f, 2.0 * geom.c0, math.inf, f"riesz_far(alpha={alpha:g})")


def riesz_full(geom: GroupGeometry, params: OperatorParams, f: RadialProfile) -> ComputedProfile:
    """``I_α f = J_α f + S_α f``, the sum taken pointwise."""
    alpha = params.order(geom)
    near = _band_operator(geom, alpha, f, 0.0, 2.0 * geom.c0, "near")
    far = _band_operator(geom, alpha, f, 2.0 * geom.c0, math.inf, "far")
    return ComputedProfile(
        lambda t: near(t) + far(t),
        near.breakpoints + far.breakpoints,
        f"riesz(alpha={alpha:g})",
    )


def riesz_near_split(
    geom: GroupGeometry, params: OperatorParams, f: RadialProfile
) -> Tuple[ComputedProfile, ComputedProfile]:
    """Split of the near piece at ``r(y) = r(x)/(2 c0)``: ``(inner, shell)``.

    The inner part is the adjoint-type piece ``S*_α``; the shell
    ``r(x)/(2c0) <= r(y) < 2 c0 r(x)`` is where the kernel is singular.
    """
    alpha = params.order(geom)
    if not f.is_decreasing():
        raise PreconditionError("decreasing", "the near piece is defined on the decreasing cone")
    c = 2.0 * geom.c0
    inner = _band_operator(geom, alpha, f, 0.0, 1.0 / c, f"near_inner(alpha={alpha:g})")
    shell = _band_operator(geom, alpha, f, 1.0 / c, c, f"near_shell(alpha={alpha:g})")
    return inner, shell


def riesz_far_adjoint(geom: GroupGeometry, params: OperatorParams, g: RadialProfile) -> ComputedProfile:
    """``S*_α g(x) = ∫_{B(e, r(x)/(2 c0))} g(y) r(xy⁻¹)^(α-Q) dy``."""
    alpha = params.order(geom)
    return _band_operator(
        geom, alpha, g, 0.0, 1.0 / (2.0 * geom.c0), f"riesz_far_adjoint(alpha={alpha:g})"
    )


def far_adjoint_ball_bracket(
    geom: GroupGeometry,
    params: OperatorParams,
    g: RadialProfile,
    radii: Iterable[float],
    settings: Settings | None = None,
) -> pd.DataFrame:
    """Compare ``∫_{B(t)} S*_α g`` with ``t^α ∫_{B(t/(4c0))} g`` and ``t^α ∫_{B(t/(2c0))} g``.

    Returns one row per radius with the three quantities and the two ratios
    ``middle/lower`` and ``middle/upper``; both should stay bounded away
    from ``0`` and ``∞`` uniformly in ``t``.
    """
    alpha = params.order(geom)
    t = np.asarray(list(radii), dtype=float)
    adj = riesz_far_adjoint(geom, params, g)
    table = polar_table(geom, adj, adj.breakpoints, settings)
    q1, c0 = geom.Q - 1.0, geom.c0
    lower = t ** alpha * geom.sigma * g.moment(q1, 0.0, t / (4.0 * c0))
    upper = t ** alpha * geom.sigma * g.moment(q1, 0.0, t / (2.0 * c0))
    middle = table.ball(t)
    with np.errstate(divide="ignore", invalid="ignore"):
        return pd.DataFrame(
            {
                "t": t,
                "lower": lower,
                "middle": middle,
                "upper": upper,
                "ratio_lower": middle / lower,
                "ratio_upper": middle / upper,
            }
        )


def kernel_annulus_integral(geom: GroupGeometry, alpha: float, rx: float, ry: float) -> float:
    """``∫_{B(e, r(x)) \\ B(e, 2c0 r(y))} r(t y⁻¹)^(α-Q) dt`` for ``r(y) = ry``.

    Zero when the annulus is empty.
    """
    if not geom.is_euclidean:
        raise ArgumentError("kernel averages are available for Euclidean geometries only")
    lo = 2.0 * geom.c0 * ry
    if rx <= lo:
        return 0.0
    n = geom.euclidean_dim
    if n == 1:
        return float(kernel_cell_integral_1d(ry, lo, rx, alpha))
    n1 = n - 1

    def integrand(s: float) -> float:
        return s ** n1 * float(euclidean_kernel_average(geom, ry, s, alpha))

    value, _ = integrate.quad(integrand, lo, rx, limit=QUAD_LIMIT)
    return value


OPERATORS: Dict[str, Callable[[GroupGeometry, OperatorParams, RadialProfile], ComputedProfile]] = {
    "hardy": hardy,
    "hardy_tail": hardy_tail,
    "weighted_hardy": weighted_hardy_H_alpha,
    "hardy_dual": hardy_dual_weighted,
    "riesz": riesz_full,
    "riesz_near": riesz_near,
    "riesz_far": riesz_far,
    "riesz_far_adjoint": riesz_far_adjoint,
}


def get_operator(name: str) -> Callable[[GroupGeometry, OperatorParams, RadialProfile], ComputedProfile]:
    try:
        return OPERATORS[name]
    except KeyError as exc:
        raise ArgumentError(f"unknown operator {name!r}; known: {sorted(OPERATORS)}") from exc


__all__ = [
    "OPERATORS",
    "OperatorParams",
    "far_adjoint_ball_bracket",
    "get_operator",
    "hardy",
    "hardy_dual_weighted",
    "hardy_tail",
    "kernel_annulus_integral",
    "kernel_cell_integral_1d",
    "riesz_far",
    "riesz_far_adjoint",
    "riesz_full",
    "riesz_near",
    "riesz_near_split",
    "weighted_hardy_H_alpha",
]
