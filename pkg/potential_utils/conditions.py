"""Supremum-type two-weight conditions for Hardy and Riesz operators on a group.

Notation used below: ``W(t) = ∫_{B(e,t)} w``, ``p' = p/(p-1)`` and
``B_t = B(e, t)``. Masses of power-weighted densities on balls and their
complements are exact moments of the profiles; every mass that involves
``W^{-p'}`` goes through a cumulative quadrature table.
"""

from __future__ import annotations

import logging
import math
from typing import Iterable, List, Literal, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

from schemas.report import ConditionReport, DoublingReport

from .errors import ArgumentError, PreconditionError
from .geometry import GroupGeometry, polar_table
from .quadrature import CumulativeTable
from .radial import RadialProfile, RadialWeight, as_weight, total_mass_is_infinite
from .scan import Factor, Mass, scan_supremum
from .settings import Settings, current_settings

logger = logging.getLogger(__name__)

Region = Literal["ball", "tail"]


class ExponentPair(BaseModel):
    """Lebesgue exponents with ``1 < p <= q < ∞``."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    p: float = Field(gt=1.0)
    q: float = Field(gt=1.0)

    @model_validator(mode="after")
    def _ordered(self) -> "ExponentPair":
        if not (math.isfinite(self.p) and math.isfinite(self.q)):
            raise ValueError("exponents must be finite")
        if self.q < self.p:
            raise ValueError(f"need p <= q, got p={self.p}, q={self.q}")
        return self

    @property
    def p_prime(self) -> float:
        return self.p / (self.p - 1.0)

    @property
    def q_prime(self) -> float:
        return self.q / (self.q - 1.0)


# --------------------------------------------------------------------------- masses


def moment_mass(geom: GroupGeometry, profile, k: float = 0.0, region: Region = "ball") -> Mass:
    """``t ↦ ∫ r^k ρ`` over ``B_t`` (ball) or ``G \\ B_t`` (tail), exact per family."""
    sigma, m = geom.sigma, geom.Q - 1.0 + k
    if region == "ball":
        return lambda t: sigma * profile.moment(m, 0.0, t)
    return lambda t: sigma * profile.moment(m, t, math.inf)


def dual_density_table(
    geom: GroupGeometry,
    w: RadialProfile | RadialWeight,
    p: float,
    c: float,
    settings: Settings | None = None,
) -> CumulativeTable:
    """Cumulative table of ``r^c W(r)^{-p'} w``."""
    pp = p / (p - 1.0)
    sigma, q1 = geom.sigma, geom.Q - 1.0

    def density(s: np.ndarray) -> np.ndarray:
        W = sigma * w.moment(q1, 0.0, s)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            return s ** c * W ** (-pp) * w(s)

    return polar_table(geom, density, w.breakpoints, settings)


def table_factor(table: CumulativeTable, region: Region, power: float, scale: float = 1.0, label: str = "") -> Factor:
    fit = table.lower if region == "ball" else table.upper
    notes = []
    if fit.verdict == "diverges":
        notes.append(f"{label}: mass diverges at {'the origin' if region == 'ball' else 'infinity'}")
    elif fit.verdict == "indeterminate":
        notes.append(f"{label}: tail exponent {fit.exponent:.4g} is borderline")
    mass = table.ball if region == "ball" else table.tail
    return Factor(mass, power, scale, label, fit.verdict == "indeterminate", tuple(notes))


def _breakpoints(*profiles, scales: Sequence[float] = (1.0,)) -> List[float]:
    return [b / c for p in profiles for b in p.breakpoints for c in scales]


def require_infinite_mass(geom: GroupGeometry, w, settings: Settings | None = None) -> None:
    verdict = total_mass_is_infinite(geom, w, settings)
    if verdict.infinite is not True:
        raise PreconditionError(
            "infinite_mass",
            f"the weight must have infinite total mass (verdict: {verdict.verdict})",
        )


def _order(geom: GroupGeometry, alpha: float) -> float:
    if not (0.0 < alpha < geom.Q):
        raise ArgumentError(f"alpha must lie in (0, Q={geom.Q:g}), got {alpha}")
    return float(alpha)


# --------------------------------------------------------------------------- Hardy on all functions


def hardy_condition(
    geom: GroupGeometry,
    pair: ExponentPair,
    u1: RadialProfile | RadialWeight,
    u2: RadialProfile | RadialWeight,
    a: float = 1.0,
    variant: Literal["near", "far"] = "near",
    settings: Settings | None = None,
) -> ConditionReport:
    """Boundedness constant of ``H^a`` (near) or ``H̃^a`` (far) from ``L^p(u1)`` to ``L^q(u2)``.

    near: ``sup_t (∫_{G\\B_t} u2)^{1/q} (∫_{B_{at}} u1^{1-p'})^{1/p'}``
    far:  ``sup_t (∫_{B_t} u2)^{1/q} (∫_{G\\B_{at}} u1^{1-p'})^{1/p'}``
    """
    if a <= 0:
        raise ArgumentError(f"dilation must be positive, got {a}")
    u1 = as_weight(u1)
    u2 = as_weight(u2, allow_vanishing=True)
    dual = u1.pow(1.0 - pair.p_prime)
    target_region: Region = "tail" if variant == "near" else "ball"
    domain_region: Region = "ball" if variant == "near" else "tail"
    factors = [
        Factor(moment_mass(geom, u2, 0.0, target_region), 1.0 / pair.q, label="target"),
        Factor(moment_mass(geom, dual, 0.0, domain_region), 1.0 / pair.p_prime, a, "dual"),
    ]
    return scan_supremum(
        f"hardy_{variant}",
        factors,
        settings,
        _breakpoints(u2) + _breakpoints(u1, scales=(a,)),
    )


# --------------------------------------------------------------------------- Riesz on the cone


def riesz_hypothesis_branch(
    geom: GroupGeometry,
    pair: ExponentPair,
    alpha: float,
    w,
    v,
    settings: Settings | None = None,
) -> Tuple[str, List[DoublingReport]]:
    """Which doubling side condition holds: ``"w"`` (``w ∈ DC^{α,p}``), ``"v"`` (``v ∈ DC``) or ``"unverified"``."""
    reports: List[DoublingReport] = []
    if alpha < geom.Q / pair.p:
        rep = doubling_check(geom, w, "DC_gamma_p", gamma=alpha, p=pair.p, settings=settings)
        reports.append(rep)
        if rep.member == "true":
            return "w", reports
    rep = doubling_check(geom, v, "DC", settings=settings)
    reports.append(rep)
    if rep.member == "true":
        return "v", reports
    return "unverified", reports


def riesz_conditions(
    geom: GroupGeometry,
    pair: ExponentPair,
    alpha: float,
    w: RadialProfile | RadialWeight,
    v: RadialProfile | RadialWeight,
    settings: Settings | None = None,
) -> List[ConditionReport]:
    """The three conditions characterising ``I_α: L^p_dec(w) -> L^q(v)``.

    i:   ``sup_t W(t)^{-1/p} (∫_{B_t} r^{αq} v)^{1/q}``
    ii:  ``sup_t (∫_{B_t} r^{p'Q} W^{-p'} w)^{1/p'} (∫_{G\\B_t} r^{(α-Q)q} v)^{1/q}``
    iii: ``sup_t (∫_{B_t} v)^{1/q} (∫_{G\\B_t} r^{αp'} W^{-p'} w)^{1/p'}``
    """
    alpha = _order(geom, alpha)
    w = as_weight(w)
    v = as_weight(v, allow_vanishing=True)
    require_infinite_mass(geom, w, settings)
    p, q, pp, Q = pair.p, pair.q, pair.p_prime, geom.Q
    branch, _ = riesz_hypothesis_branch(geom, pair, alpha, w, v, settings)
    if branch == "unverified":
        logger.warning("neither doubling side condition could be verified for %r, %r", w, v)
    notes = [f"doubling branch: {branch}"]
    extra = _breakpoints(w, v)
    W = moment_mass(geom, w)

    first = scan_supremum(
        "riesz_i",
        [
            Factor(W, -1.0 / p, label="W"),
            Factor(moment_mass(geom, v, alpha * q), 1.0 / q, label="ball r^{αq} v"),
        ],
        settings,
        extra,
        notes,
    )
    inner = dual_density_table(geom, w, p, pp * Q, settings)
    second = scan_supremum(
        "riesz_ii",
        [
            table_factor(inner, "ball", 1.0 / pp, label="ball r^{p'Q} W^{-p'} w"),
            Factor(moment_mass(geom, v, (alpha - Q) * q, "tail"), 1.0 / q, label="tail r^{(α-Q)q} v"),
        ],
        settings,
        extra,
        notes,
    )
    outer = dual_density_table(geom, w, p, alpha * pp, settings)
    third = scan_supremum(
        "riesz_iii",
        [
            Factor(moment_mass(geom, v), 1.0 / q, label="ball v"),
            table_factor(outer, "tail", 1.0 / pp, label="tail r^{αp'} W^{-p'} w"),
        ],
        settings,
        extra,
        notes,
    )
    return [first, second, third]


def hardy_cone_conditions(
    geom: GroupGeometry,
    pair: ExponentPair,
    w: RadialProfile | RadialWeight,
    v: RadialProfile | RadialWeight,
    settings: Settings | None = None,
) -> List[ConditionReport]:
    """Conditions for ``H: L^p_dec(w) -> L^q(v)``.

    i:  ``sup_t W(t)^{-1/p} (∫_{B_t} v r^{Qq})^{1/q}``
    ii: ``sup_t (∫_{B_t} r^{Qp'} W^{-p'} w)^{1/p'} (∫_{G\\B_t} v)^{1/q}``
    """
    w = as_weight(w)
    v = as_weight(v, allow_vanishing=True)
    require_infinite_mass(geom, w, settings)
    p, q, pp, Q = pair.p, pair.q, pair.p_prime, geom.Q
    extra = _breakpoints(w, v)
    first = scan_supremum(
        "hardy_cone_i",
        [
            Factor(moment_mass(geom, w), -1.0 / p, label="W"),
            Factor(moment_mass(geom, v, Q * q), 1.0 / q, label="ball r^{Qq} v"),
        ],
        settings,
        extra,
    )
    table = dual_density_table(geom, w, p, Q * pp, settings)
    second = scan_supremum(
        "hardy_cone_ii",
        [
            table_factor(table, "ball", 1.0 / pp, label="ball r^{Qp'} W^{-p'} w"),
            Factor(moment_mass(geom, v, 0.0, "tail"), 1.0 / q, label="tail v"),
        ],
        settings,
        extra,
    )
    return [first, second]


FarPieceForm = Literal["sufficient", "necessary", "doubling"]


def far_piece_conditions(
    geom: GroupGeometry,
    pair: ExponentPair,
    alpha: float,
    w: RadialProfile | RadialWeight,
    v: RadialProfile | RadialWeight,
    which: FarPieceForm = "sufficient",
    settings: Settings | None = None,
) -> ConditionReport:
    """``sup_t (∫_{G\\B_t} r^{αp'} W^{-p'} w)^{1/p'} (∫_{B_{ρ t}} v)^{1/q}``.

    ``ρ = 1/(2c0)`` for the sufficient form, ``1/(4c0)`` for the necessary
    form and ``1`` for the form that is equivalent under ``v ∈ DC``.
    """
    alpha = _order(geom, alpha)
    w = as_weight(w)
    v = as_weight(v, allow_vanishing=True)
    require_infinite_mass(geom, w, settings)
    radius = {
        "sufficient": 1.0 / (2.0 * geom.c0),
        "necessary": 1.0 / (4.0 * geom.c0),
        "doubling": 1.0,
    }
    if which not in radius:
        raise ArgumentError(f"unknown form {which!r}")
    pp = pair.p_prime
    table = dual_density_table(geom, w, pair.p, alpha * pp, settings)
    return scan_supremum(
        f"far_piece_{which}",
        [
            table_factor(table, "tail", 1.0 / pp, label="tail r^{αp'} W^{-p'} w"),
            Factor(moment_mass(geom, v), 1.0 / pair.q, radius[which], "ball v"),
        ],
        settings,
        _breakpoints(w) + _breakpoints(v, scales=(radius[which],)),
    )


def tail_identity(
    geom: GroupGeometry,
    w: RadialProfile | RadialWeight,
    p: float,
    radii: Iterable[float],
    settings: Settings | None = None,
) -> pd.DataFrame:
    """Check ``(∫_{G\\B_t} W^{-p'} w)^{1/p'} = (p'-1)^{-1/p'} W(t)^{-1/p}`` at the given radii."""
    w = as_weight(w)
    require_infinite_mass(geom, w, settings)
    pp = p / (p - 1.0)
    t = np.asarray(list(radii), dtype=float)
    table = dual_density_table(geom, w, p, 0.0, settings)
    lhs = table.tail(t) ** (1.0 / pp)
    rhs = (pp - 1.0) ** (-1.0 / pp) * moment_mass(geom, w)(t) ** (-1.0 / p)
    return pd.DataFrame({"t": t, "lhs": lhs, "rhs": rhs, "relative_error": np.abs(lhs / rhs - 1.0)})


# --------------------------------------------------------------------------- doubling


WeightClass = Literal["DC", "DC_gamma_p"]


def _finite_window(masses: Sequence[Tuple[Mass, float]], settings: Settings) -> Optional[Tuple[float, float]]:
    """Largest contiguous run of scan radii where every mass is finite."""
    t = np.geomspace(settings.t_min, settings.t_max, settings.scan_points)
    ok = np.ones_like(t, dtype=bool)
    with np.errstate(all="ignore"):
        for mass, scale in masses:
            ok &= np.isfinite(np.asarray(mass(scale * t), dtype=float))
    if not np.any(ok):
        return None
    best, start, run = (0, 0), None, 0
    for i, flag in enumerate(ok):
        if flag:
            start = i if start is None else start
            if i - start + 1 > run:
                run, best = i - start + 1, (start, i)
        else:
            start = None
    return float(t[best[0]]), float(t[best[1]])


def doubling_check(
    geom: GroupGeometry,
    rho: RadialProfile | RadialWeight,
    weight_class: WeightClass = "DC",
    gamma: Optional[float] = None,
    p: Optional[float] = None,
    settings: Settings | None = None,
) -> DoublingReport:
    """Worst-case doubling ratio over the scan grid and the membership verdict.

    DC:          ``∫_{B_{2t}} ρ <= b ∫_{B_t} ρ``
    DC_gamma_p:  ``T(t) <= b T(2t)`` with ``T(t) = ∫_{G\\B_t} r^{γp'} W^{-p'} w``
    """
    s = settings or current_settings()
    if weight_class == "DC":
        rho = as_weight(rho, allow_vanishing=True)
        mass = moment_mass(geom, rho)
        factors = [Factor(mass, 1.0, 2.0), Factor(mass, -1.0)]
        masses = [(mass, 1.0), (mass, 2.0)]
        extra = _breakpoints(rho, scales=(1.0, 2.0))
    elif weight_class == "DC_gamma_p":
        if p is None or gamma is None or not p > 1:
            raise ArgumentError("DC_gamma_p needs gamma and p > 1")
        if not (0.0 < gamma < geom.Q / p):
            raise PreconditionError("doubling_range", f"need 0 < gamma < Q/p = {geom.Q / p:g}, got {gamma}")
        rho = as_weight(rho)
        table = dual_density_table(geom, rho, p, gamma * p / (p - 1.0), s)
        factors = [Factor(table.tail, 1.0), Factor(table.tail, -1.0, 2.0)]
        masses = [(table.tail, 1.0), (table.tail, 2.0)]
        extra = _breakpoints(rho, scales=(1.0, 2.0))
    else:
        raise ArgumentError(f"unknown weight class {weight_class!r}")

    label = weight_class if weight_class == "DC" else f"DC_gamma_p(gamma={gamma:g}, p={p:g})"
    window = _finite_window(masses, s)
    if window is None or window[1] / window[0] < 1e4:
        return DoublingReport(
            weight_class=label,
            constant_b=math.inf,
            member="indeterminate",
            notes=["defining integrals diverge on the scan range"],
        )
    notes = []
    scan_settings = s
    if window != (s.t_min, s.t_max):
        notes.append(f"scan restricted to [{window[0]:.4g}, {window[1]:.4g}] where the integrals are finite")
        scan_settings = s.model_copy(update={"t_min": window[0], "t_max": window[1]})
    report = scan_supremum(label, factors, scan_settings, extra)
    b = report.value if report.finite == "false" else max(report.value, 1.0)
    return DoublingReport(
        weight_class=label,
        constant_b=b,
        member=report.finite,
        argmax=report.argmax,
        notes=notes + list(report.diagnostics.notes),
    )


__all__ = [
    "ExponentPair",
    "dual_density_table",
    "doubling_check",
    "far_piece_conditions",
    "hardy_condition",
    "hardy_cone_conditions",
    "moment_mass",
    "require_infinite_mass",
    "riesz_conditions",
    "riesz_hypothesis_branch",
    "table_factor",
    "tail_identity",
]
