"""
surfaces.py
-----------
Functions of two radii ``(t, τ) = (r1(x), r2(y))`` on ``G1 x G2``.

Three representations
• SeparableSurface   f1(t) f2(τ); masses are outer products of 1D moments
• GridSurface        step function on a rectangular grid; masses are M1 V M2ᵀ
• ComputedSurface    any vectorised callable; masses by a tensor log-GL rule

Every surface answers ``mass(geom, regions, powers)``, a callable
``(t, τ) -> len(t) x len(τ)`` matrix of

    ∫∫_{R1(t) x R2(τ)} r1^k1 r2^k2 ρ(r1, r2) dx dy,

where each ``R`` is a ball ``B(e, ·)`` or its complement.
"""

from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from typing import Callable, List, Sequence, Tuple

import numpy as np

from ..errors import ArgumentError, PreconditionError
from ..geometry import GroupGeometry, ProductGeometry
from ..quadrature import LogQuadrature
from ..radial import (
    ComputedProfile,
    RadialProfile,
    RadialWeight,
    StepProfile,
    as_weight,
    constant,
    indicator,
    power_integral,
    profile_from_record,
    total_mass_is_infinite,
)
from ..settings import Settings, current_settings

logger = logging.getLogger(__name__)

Region = str  # "ball" | "tail"
JointMass = Callable[[np.ndarray, np.ndarray], np.ndarray]

_REGIONS = ("ball", "tail")


def _check_regions(regions: Tuple[Region, Region]) -> None:
    if len(regions) != 2 or any(r not in _REGIONS for r in regions):
        raise ArgumentError(f"regions must be two of {_REGIONS}, got {regions}")


def _limits(region: Region, t: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    if region == "ball":
        return np.zeros_like(t), t
    return t, np.full_like(t, math.inf)


def _safe_bilinear(A: np.ndarray, V: np.ndarray, B: np.ndarray) -> np.ndarray:
    """``A V Bᵀ`` for nonnegative factors with ``0 * inf = 0``."""
    A0 = np.where(np.isinf(A), 0.0, A)
    B0 = np.where(np.isinf(B), 0.0, B)
    with np.errstate(invalid="ignore", over="ignore"):
        out = A0 @ V @ B0.T
    P = (V > 0).astype(float)
    inf_a = np.isinf(A).astype(float) @ P @ (B > 0).astype(float).T
    inf_b = (A > 0).astype(float) @ P @ np.isinf(B).astype(float).T
    return np.where((inf_a > 0) | (inf_b > 0), math.inf, out)


class Surface(ABC):
    """Nonnegative function of two radii."""

    family = "surface"

    @abstractmethod
    def __call__(self, t, tau) -> np.ndarray:
        """Values on the outer grid ``t x τ``."""

    @property
    def breakpoints(self) -> Tuple[Tuple[float, ...], Tuple[float, ...]]:
        return (), ()

    @abstractmethod
    def mass(self, geom: ProductGeometry, regions: Tuple[Region, Region], powers: Tuple[float, float] = (0.0, 0.0)) -> JointMass:
        ...

    @abstractmethod
    def pow(self, m: float) -> "Surface":
        ...

    @abstractmethod
    def scaled(self, c: float) -> "Surface":
        ...

    @abstractmethod
    def slice(self, fixed_axis: int, x: float) -> RadialProfile:
        """Profile in the other radius with radius ``x`` held fixed on ``fixed_axis``."""

    @property
    def is_separable(self) -> bool:
        return False

    def factors(self) -> Tuple[RadialProfile, RadialProfile]:
        raise PreconditionError("product_form", f"{type(self).__name__} is not of product form")

    def indicator_terms(self) -> Tuple[np.ndarray, List[RadialProfile], List[RadialProfile]]:
        """``(C, B1, B2)`` with ``ρ = Σ C[i, j] B1[i] ⊗ B2[j]`` and decreasing ``B``'s."""
        raise ArgumentError(f"{type(self).__name__} has no finite decomposition into ball indicators")

    def is_bidecreasing(self, settings: Settings | None = None) -> bool:
        s = settings or current_settings()
        t = np.geomspace(s.t_min, s.t_max, 97)
        with np.errstate(all="ignore"):
            v = np.asarray(self(t, t), dtype=float)
        tol = 1e-12 * np.maximum(1.0, np.abs(v))
        return bool(np.all(np.diff(v, axis=0) <= tol[1:, :]) and np.all(np.diff(v, axis=1) <= tol[:, 1:]))

    def to_record(self) -> dict:
        return {"family": self.family}

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.to_record()})"


class SeparableSurface(Surface):
    """``f1(t) f2(τ)``."""

    family = "separable"

    def __init__(self, first: RadialProfile, second: RadialProfile) -> None:
        self.first = first.profile if isinstance(first, RadialWeight) else first
        self.second = second.profile if isinstance(second, RadialWeight) else second

    def __call__(self, t, tau) -> np.ndarray:
        a = np.asarray(self.first(np.asarray(t, dtype=float)), dtype=float).ravel()
        b = np.asarray(self.second(np.asarray(tau, dtype=float)), dtype=float).ravel()
        with np.errstate(invalid="ignore"):
            out = np.outer(a, b)
        return np.where((a[:, None] == 0) | (b[None, :] == 0), 0.0, out)

    @property
    def breakpoints(self) -> Tuple[Tuple[float, ...], Tuple[float, ...]]:
        return self.first.breakpoints, self.second.breakpoints

    def mass(self, geom, regions, powers=(0.0, 0.0)) -> JointMass:
        _check_regions(regions)
        g1, g2 = geom.first, geom.second
        k1 = g1.Q - 1.0 + powers[0]
        k2 = g2.Q - 1.0 + powers[1]
        f1, f2 = self.first, self.second

        def joint(t: np.ndarray, tau: np.ndarray) -> np.ndarray:
            t = np.asarray(t, dtype=float).ravel()
            tau = np.asarray(tau, dtype=float).ravel()
            m1 = g1.sigma * f1.moment(k1, *_limits(regions[0], t))
            m2 = g2.sigma * f2.moment(k2, *_limits(regions[1], tau))
            with np.errstate(invalid="ignore"):
                out = np.outer(m1, m2)
            return np.where((m1[:, None] == 0) | (m2[None, :] == 0), 0.0, out)

        return joint

    def pow(self, m: float) -> Surface:
        return SeparableSurface(self.first.pow(m), self.second.pow(m))

    def scaled(self, c: float) -> Surface:
        return SeparableSurface(self.first.scaled(c), self.second)

    def slice(self, fixed_axis: int, x: float) -> RadialProfile:
        if fixed_axis == 1:
            return self.second.scaled(float(self.first(np.array(x))))
        return self.first.scaled(float(self.second(np.array(x))))

    @property
    def is_separable(self) -> bool:
        return True

    def factors(self) -> Tuple[RadialProfile, RadialProfile]:
        return self.first, self.second

    def indicator_terms(self):
        return np.ones((1, 1)), [self.first], [self.second]

    def is_bidecreasing(self, settings: Settings | None = None) -> bool:
        return self.first.is_decreasing(settings) and self.second.is_decreasing(settings)

    def to_record(self) -> dict:
        return {"family": self.family, "first": self.first.to_record(), "second": self.second.to_record()}


def _difference_basis(grid: np.ndarray) -> Tuple[np.ndarray, List[RadialProfile]]:
    """``D`` and ball indicators with ``Σ_i v_i χ_cell_i = Σ_j (D v)_j B_j``.

    ``B_j = χ_{(0, grid[j])}`` for the bounded cells and ``B_n ≡ 1`` for the
    unbounded one.
    """
    n = len(grid)
    D = np.zeros((n + 1, n + 1))
    for j in range(n):
        D[j, j], D[j, j + 1] = 1.0, -1.0
    D[n, n] = 1.0
    basis: List[RadialProfile] = [indicator(float(g)) for g in grid] + [constant(1.0)]
    return D, basis


class GridSurface(Surface):
    """Step function: ``values[i, j]`` on ``cell1[i] x cell2[j]``.

    Cells follow ``StepProfile``: ``[0, g0), [g0, g1), ..., [g_last, ∞)``, so
    ``values`` has shape ``(len(grid1) + 1, len(grid2) + 1)``.
    """

    family = "grid"

    def __init__(self, grid1: Sequence[float], grid2: Sequence[float], values) -> None:
        g1 = np.asarray(grid1, dtype=float)
        g2 = np.asarray(grid2, dtype=float)
        v = np.asarray(values, dtype=float)
        for g in (g1, g2):
            if g.ndim != 1 or g.size == 0 or g[0] <= 0 or np.any(np.diff(g) <= 0) or not np.all(np.isfinite(g)):
                raise ArgumentError("surface grids must be positive, finite and strictly increasing")
        if v.shape != (g1.size + 1, g2.size + 1):
            raise ArgumentError(f"values must have shape {(g1.size + 1, g2.size + 1)}, got {v.shape}")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise ArgumentError("surface values must be finite and nonnegative")
        self.grid1, self.grid2, self.values = g1, g2, v

    def _index(self, grid: np.ndarray, t) -> np.ndarray:
        return np.searchsorted(grid, np.asarray(t, dtype=float).ravel(), side="right")

    def __call__(self, t, tau) -> np.ndarray:
        return self.values[np.ix_(self._index(self.grid1, t), self._index(self.grid2, tau))]

    @property
    def breakpoints(self):
        return tuple(self.grid1.tolist()), tuple(self.grid2.tolist())

    @staticmethod
    def _cell_masses(geom: GroupGeometry, grid: np.ndarray, region: Region, k: float, t: np.ndarray) -> np.ndarray:
        left = np.concatenate([[0.0], grid])
        right = np.concatenate([grid, [math.inf]])
        lo, hi = _limits(region, t)
        a = np.maximum(left[None, :], lo[:, None])
        b = np.minimum(right[None, :], hi[:, None])
        return geom.sigma * power_integral(geom.Q - 1.0 + k, a, b)

    def mass(self, geom, regions, powers=(0.0, 0.0)) -> JointMass:
        _check_regions(regions)

        def joint(t: np.ndarray, tau: np.ndarray) -> np.ndarray:
            t = np.asarray(t, dtype=float).ravel()
            tau = np.asarray(tau, dtype=float).ravel()
            A = self._cell_masses(geom.first, self.grid1, regions[0], powers[0], t)
            B = self._cell_masses(geom.second, self.grid2, regions[1], powers[1], tau)
            return _safe_bilinear(A, self.values, B)

        return joint

    def pow(self, m: float) -> Surface:
        if m < 0 and np.any(self.values == 0):
            raise ArgumentError("negative power of a surface that vanishes somewhere")
        return GridSurface(self.grid1, self.grid2, self.values ** m)

    def scaled(self, c: float) -> Surface:
        return GridSurface(self.grid1, self.grid2, self.values * c)

    def slice(self, fixed_axis: int, x: float) -> RadialProfile:
        if fixed_axis == 1:
            row = self.values[int(self._index(self.grid1, x)[0]), :]
            return StepProfile(self.grid2, row[:-1], row[-1])
        col = self.values[:, int(self._index(self.grid2, x)[0])]
        return StepProfile(self.grid1, col[:-1], col[-1])

    def indicator_terms(self):
        D1, b1 = _difference_basis(self.grid1)
        D2, b2 = _difference_basis(self.grid2)
        return D1 @ self.values @ D2.T, b1, b2

    def is_bidecreasing(self, settings: Settings | None = None) -> bool:
        v = self.values
        return bool(np.all(np.diff(v, axis=0) <= 0) and np.all(np.diff(v, axis=1) <= 0))

    def to_record(self) -> dict:
        return {
            "family": self.family,
            "grid1": self.grid1.tolist(),
            "grid2": self.grid2.tolist(),
            "values": self.values.tolist(),
        }


class ComputedSurface(Surface):
    """Surface given by ``func(t, τ) -> matrix``.

    Masses use a tensor Gauss rule in ``(log t, log τ)`` restricted to
    ``[t_min, t_max]^2``; contributions from outside that square are dropped.
    """

    family = "computed"
    QUAD_ORDER = 4

    def __init__(
        self,
        func: Callable[[np.ndarray, np.ndarray], np.ndarray],
        breakpoints: Tuple[Sequence[float], Sequence[float]] = ((), ()),
        label: str = "",
        settings: Settings | None = None,
    ) -> None:
        self.func = func
        self._breakpoints = tuple(tuple(sorted({float(b) for b in bps if 0 < b < math.inf})) for bps in breakpoints)
        self.label = label
        self.settings = settings or current_settings()

    def __call__(self, t, tau) -> np.ndarray:
        t = np.asarray(t, dtype=float).ravel()
        tau = np.asarray(tau, dtype=float).ravel()
        return np.asarray(self.func(t, tau), dtype=float).reshape(t.size, tau.size)

    @property
    def breakpoints(self):
        return self._breakpoints

    def _axis_rule(self, bps: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
        s = self.settings
        quad = LogQuadrature(s.t_min, s.t_max, max(2, s.cells_per_decade // 2), self.QUAD_ORDER, bps, s.verdict_tolerance)
        return quad.nodes.ravel(), quad.weights.ravel()

    def mass(self, geom, regions, powers=(0.0, 0.0)) -> JointMass:
        _check_regions(regions)
        n1, w1 = self._axis_rule(self._breakpoints[0])
        n2, w2 = self._axis_rule(self._breakpoints[1])
        g1, g2 = geom.first, geom.second
        w1 = g1.sigma * w1 * n1 ** (g1.Q - 1.0 + powers[0])
        w2 = g2.sigma * w2 * n2 ** (g2.Q - 1.0 + powers[1])
        with np.errstate(all="ignore"):
            F = np.nan_to_num(self(n1, n2), nan=0.0)

        def joint(t: np.ndarray, tau: np.ndarray) -> np.ndarray:
            t = np.asarray(t, dtype=float).ravel()
            tau = np.asarray(tau, dtype=float).ravel()
            in1 = (n1[None, :] < t[:, None]) if regions[0] == "ball" else (n1[None, :] >= t[:, None])
            in2 = (n2[None, :] < tau[:, None]) if regions[1] == "ball" else (n2[None, :] >= tau[:, None])
            return _safe_bilinear(in1 * w1[None, :], F, in2 * w2[None, :])

        return joint

    def pow(self, m: float) -> Surface:
        func = self.func

        def powered(t, tau):
            with np.errstate(divide="ignore", over="ignore"):
                return np.asarray(func(t, tau), dtype=float) ** m

        return ComputedSurface(powered, self._breakpoints, f"({self.label})^{m:g}", self.settings)

    def scaled(self, c: float) -> Surface:
        func = self.func
        return ComputedSurface(lambda t, tau: c * np.asarray(func(t, tau)), self._breakpoints, self.label, self.settings)

    def slice(self, fixed_axis: int, x: float) -> RadialProfile:
        xs = np.array([float(x)])
        if fixed_axis == 1:
            return ComputedProfile(lambda s: self(xs, s)[0], self._breakpoints[1], f"{self.label}[t={x:g}]")
        return ComputedProfile(lambda s: self(s, xs)[:, 0], self._breakpoints[0], f"{self.label}[τ={x:g}]")

    def to_record(self) -> dict:
        return {"family": self.family, "label": self.label}


class ProductWeight:
    """Weight on ``G1 x G2`` that is radial in each factor.

    Domain weights must be positive almost everywhere; pass
    ``allow_vanishing=True`` for target weights.
    """

    def __init__(self, surface: Surface, allow_vanishing: bool = False, settings: Settings | None = None) -> None:
        if isinstance(surface, ProductWeight):
            surface = surface.surface
        self.surface = surface
        self.allow_vanishing = allow_vanishing
        if not allow_vanishing and not self._positive(settings):
            raise ArgumentError(f"weight {surface!r} is not positive almost everywhere")

    @classmethod
    def product(cls, w1, w2, allow_vanishing: bool = False) -> "ProductWeight":
        return cls(SeparableSurface(w1, w2), allow_vanishing)

    def _positive(self, settings: Settings | None) -> bool:
        s = self.surface
        if isinstance(s, SeparableSurface):
            return all(as_weight(f, allow_vanishing=True)._positive(settings) for f in (s.first, s.second))
        if isinstance(s, GridSurface):
            return bool(np.all(s.values > 0))
        st = settings or current_settings()
        t = np.geomspace(st.t_min, st.t_max, 97)
        with np.errstate(all="ignore"):
            return bool(np.all(np.asarray(s(t, t)) > 0))

    def __call__(self, t, tau) -> np.ndarray:
        return self.surface(t, tau)

    @property
    def breakpoints(self):
        return self.surface.breakpoints

    @property
    def is_separable(self) -> bool:
        return self.surface.is_separable

    def factors(self) -> Tuple[RadialWeight, RadialWeight]:
        f1, f2 = self.surface.factors()
        return as_weight(f1, self.allow_vanishing), as_weight(f2, self.allow_vanishing)

    def mass(self, geom: ProductGeometry, regions, powers=(0.0, 0.0)) -> JointMass:
        return self.surface.mass(geom, regions, powers)

    def pow(self, m: float) -> "ProductWeight":
        return ProductWeight(self.surface.pow(m), self.allow_vanishing)

    def scaled(self, c: float) -> "ProductWeight":
        return ProductWeight(self.surface.scaled(c), self.allow_vanishing)

    def slice(self, fixed_axis: int, x: float) -> RadialProfile:
        return self.surface.slice(fixed_axis, x)

    def require_infinite_axis_masses(self, geom: ProductGeometry, settings: Settings | None = None) -> Tuple[RadialWeight, RadialWeight]:
        """Factors ``(w1, w2)`` after checking ``W_i(∞) = ∞`` on both axes."""
        w1, w2 = self.factors()
        for i, wi in ((1, w1), (2, w2)):
            verdict = total_mass_is_infinite(geom.axis(i), wi, settings)
            if verdict.infinite is not True:
                raise PreconditionError(
                    "infinite_mass",
                    f"axis {i} weight must have infinite total mass (verdict: {verdict.verdict})",
                )
        return w1, w2

    def __repr__(self) -> str:
        return f"ProductWeight({self.surface!r})"


def as_product_weight(w, allow_vanishing: bool = False) -> ProductWeight:
    if isinstance(w, ProductWeight):
        return w
    return ProductWeight(w, allow_vanishing)


class BiDecreasingProfile(Surface):
    """A surface checked to be nonincreasing in each radius; delegates to ``base``."""

    def __init__(self, base: Surface, settings: Settings | None = None) -> None:
        if isinstance(base, BiDecreasingProfile):
            base = base.base
        if not base.is_bidecreasing(settings):
            raise ArgumentError(f"{type(base).__name__} is not nonincreasing in each radius")
        self.base = base

    @property
    def family(self) -> str:  # type: ignore[override]
        return self.base.family

    def __call__(self, t, tau) -> np.ndarray:
        return self.base(t, tau)

    @property
    def breakpoints(self):
        return self.base.breakpoints

    def mass(self, geom, regions, powers=(0.0, 0.0)) -> JointMass:
        return self.base.mass(geom, regions, powers)

    def pow(self, m: float) -> Surface:
        return self.base.pow(m)

    def scaled(self, c: float) -> Surface:
        return BiDecreasingProfile(self.base.scaled(c))

    def slice(self, fixed_axis: int, x: float) -> RadialProfile:
        return self.base.slice(fixed_axis, x)

    @property
    def is_separable(self) -> bool:
        return self.base.is_separable

    def factors(self):
        return self.base.factors()

    def indicator_terms(self):
        return self.base.indicator_terms()

    def is_bidecreasing(self, settings: Settings | None = None) -> bool:
        return True

    def to_record(self) -> dict:
        return self.base.to_record()


def surface_from_record(record: dict) -> Surface:
    """Inverse of ``to_record`` for the declarative families."""
    data = dict(record)
    family = data.pop("family", None)
    if family == "separable":
        return SeparableSurface(profile_from_record(data["first"]), profile_from_record(data["second"]))
    if family == "grid":
        return GridSurface(data["grid1"], data["grid2"], data["values"])
    raise ArgumentError(f"unknown surface family {family!r}")


__all__ = [
    "BiDecreasingProfile",
    "ComputedSurface",
    "GridSurface",
    "ProductWeight",
    "SeparableSurface",
    "Surface",
    "as_product_weight",
    "surface_from_record",
]
