"""Homogeneous-group constants and the radial reduction of integrals.

Only the quantities the radial calculus needs are modelled: the homogeneous
dimension ``Q``, the measure ``sigma`` of the unit sphere in the polar formula
``∫ u(r(x)) dx = sigma ∫ u(t) t^(Q-1) dt``, the quasi-triangle constant ``c0``
and, for Euclidean space, the topological dimension used by the kernel
averages.
"""

from __future__ import annotations

import logging
import math
from typing import Callable, Iterable, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import integrate, special

from .errors import ArgumentError, DivergenceError
from .quadrature import CumulativeTable, LogQuadrature
from .settings import Settings

logger = logging.getLogger(__name__)


def sphere_measure(n: int) -> float:
    """Surface measure of the unit sphere in ``R^n`` (``2`` for ``n = 1``)."""
    return 2.0 * math.pi ** (n / 2.0) / special.gamma(n / 2.0)


class GroupGeometry(BaseModel):
    """Constants of a homogeneous group with a fixed homogeneous norm."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    Q: float = Field(gt=0)
    sigma: float = Field(gt=0)
    c0: float = Field(default=1.0, ge=1.0)
    euclidean_dim: Optional[int] = Field(default=None, ge=1)

    @model_validator(mode="after")
    def _euclidean_constants(self) -> "GroupGeometry":
        n = self.euclidean_dim
        if n is None:
            return self
        if self.Q != n:
            raise ValueError(f"euclidean_dim={n} requires Q={n}, got {self.Q}")
        if not math.isclose(self.sigma, sphere_measure(n), rel_tol=1e-12):
            raise ValueError(f"R^{n} requires sigma={sphere_measure(n)!r}, got {self.sigma}")
        if self.c0 != 1.0:
            raise ValueError("the Euclidean norm satisfies the triangle inequality (c0=1)")
        return self

    @classmethod
    def euclidean(cls, n: int) -> "GroupGeometry":
        return cls(Q=float(n), sigma=sphere_measure(n), c0=1.0, euclidean_dim=n)

    @property
    def is_euclidean(self) -> bool:
        return self.euclidean_dim is not None

    def ball_volume(self, t) -> np.ndarray:
        return self.sigma * np.asarray(t, dtype=float) ** self.Q / self.Q

    def shell_volume(self, lo, hi) -> np.ndarray:
        """Measure of ``{lo <= r(x) < hi}``."""
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        return self.sigma * (hi ** self.Q - lo ** self.Q) / self.Q

    def label(self) -> str:
        if self.is_euclidean:
            return f"R^{self.euclidean_dim}"
        return f"G(Q={self.Q:g}, c0={self.c0:g})"


class ProductGeometry(BaseModel):
    """Pair of homogeneous groups ``G1 x G2``."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    first: GroupGeometry
    second: GroupGeometry

    def axis(self, i: int) -> GroupGeometry:
        if i not in (1, 2):
            raise ArgumentError(f"axis must be 1 or 2, got {i}")
        return self.first if i == 1 else self.second

    def swapped(self) -> "ProductGeometry":
        return ProductGeometry(first=self.second, second=self.first)


def polar_table(
    geom: GroupGeometry,
    u: Callable[[np.ndarray], np.ndarray],
    breakpoints: Iterable[float] = (),
    settings: Settings | None = None,
) -> CumulativeTable:
    """Cumulative table of ``sigma u(s) s^(Q-1)``: ``ball(t) = ∫_{B(e,t)} u(r(x)) dx``."""
    quad = LogQuadrature.from_settings(settings, breakpoints)
    sigma, q1 = geom.sigma, geom.Q - 1.0
    return quad.table(lambda s: sigma * u(s) * s ** q1)


def polar_integral(
    geom: GroupGeometry,
    u: Callable[[np.ndarray], np.ndarray],
    support: tuple[float, float] = (0.0, math.inf),
    breakpoints: Iterable[float] = (),
    settings: Settings | None = None,
) -> float:
    """``∫_{lo <= r(x) < hi} u(r(x)) dx`` through the polar formula.

    Raises ``DivergenceError`` (carrying the finite part computed on the grid)
    when a tail that the interval reaches does not converge. Tails the fit
    cannot classify are extrapolated with a warning.
    """
    lo, hi = support
    if not (0.0 <= lo <= hi) or math.isnan(hi):
        raise ArgumentError(f"invalid support interval ({lo}, {hi})")
    table = polar_table(geom, u, breakpoints, settings)
    value = table.between(lo, hi)
    if math.isfinite(value):
        for fit, reached in ((table.lower, lo == 0.0), (table.upper, math.isinf(hi))):
            if reached and fit.verdict == "indeterminate":
                logger.warning(
                    "polar integral tail at %s could not be classified (exponent %.4g); "
                    "extrapolated value used",
                    fit.side,
                    fit.exponent,
                )
        return value
    where = "origin" if lo == 0.0 and math.isinf(table.lower_value) else "infinity"
    fit = table.lower if where == "origin" else table.upper
    raise DivergenceError(where, partial=table.inner, exponent=fit.exponent)


def _sphere_average_quadrature(n: int, R: float, s: float, alpha: float) -> float:
    """``∫_{S^{n-1}} |R e1 - s w|^(alpha-n) dw`` by one angular quadrature."""
    if R == s and alpha <= 1.0:
        return math.inf
    weight = sphere_measure(n - 1)

    def f(theta: float) -> float:
        d2 = R * R + s * s - 2.0 * R * s * math.cos(theta)
        return max(d2, 0.0) ** ((alpha - n) / 2.0) * math.sin(theta) ** (n - 2)

    value, _ = integrate.quad(f, 0.0, math.pi, limit=200)
    return weight * value


def euclidean_kernel_average(geom: GroupGeometry, R, s, alpha: float) -> np.ndarray:
    """Spherical average ``k(R, s) = ∫_{S^{n-1}} |R e1 - s w|^(alpha-n) dw``.

    Closed forms for ``n = 1, 2, 3``; an angular quadrature for ``n >= 4``.
    Broadcasts over ``R`` and ``s``. The value is ``inf`` on the diagonal
    ``R == s`` whenever ``alpha <= 1``.
    """
    n = geom.euclidean_dim
    if n is None:
        raise ArgumentError("kernel averages are defined for Euclidean geometries only")
    if not (0.0 < alpha < n):
        raise ArgumentError(f"alpha must lie in (0, {n}), got {alpha}")
    R, s = np.broadcast_arrays(np.asarray(R, dtype=float), np.asarray(s, dtype=float))
    sigma = geom.sigma
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        big = np.maximum(R, s)
        degenerate = (R == 0.0) | (s == 0.0)
        if n == 1:
            out = np.abs(R - s) ** (alpha - 1.0) + (R + s) ** (alpha - 1.0)
        elif n == 2:
            z = 4.0 * R * s / (R + s) ** 2
            out = (
                2.0
                * math.pi
                * (R + s) ** (alpha - 2.0)
                * special.hyp2f1((2.0 - alpha) / 2.0, 0.5, 1.0, z)
            )
        elif n == 3:
            if alpha == 1.0:
                out = 2.0 * math.pi * np.log((R + s) / np.abs(R - s)) / (R * s)
            else:
                out = (
                    2.0
                    * math.pi
                    * ((R + s) ** (alpha - 1.0) - np.abs(R - s) ** (alpha - 1.0))
                    / (R * s * (alpha - 1.0))
                )
        else:
            vec = np.vectorize(lambda r_, s_: _sphere_average_quadrature(n, r_, s_, alpha))
            out = np.asarray(vec(R, s), dtype=float)
        out = np.where(degenerate, sigma * big ** (alpha - n), out)
        if alpha <= 1.0:
            out = np.where((R == s) & ~degenerate & (alpha <= 1.0), math.inf, out)
    return np.asarray(out, dtype=float)


def sphere_average_by_quadrature(geom: GroupGeometry, R: float, s: float, alpha: float) -> float:
    """Angular-quadrature value of the kernel average, used to cross-check the closed forms."""
    n = geom.euclidean_dim
    if n is None:
        raise ArgumentError("kernel averages are defined for Euclidean geometries only")
    if n == 1:
        return float(abs(R - s) ** (alpha - 1.0) + (R + s) ** (alpha - 1.0))
    return _sphere_average_quadrature(n, float(R), float(s), float(alpha))


__all__ = [
    "GroupGeometry",
    "ProductGeometry",
    "euclidean_kernel_average",
    "polar_integral",
    "polar_table",
    "sphere_average_by_quadrature",
    "sphere_measure",
]
