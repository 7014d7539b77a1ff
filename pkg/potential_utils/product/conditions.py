"""
conditions.py
-------------
Two-radius supremum conditions on ``G1 x G2``.

Axis quantities for a product weight ``w = w1 ⊗ w2`` (``p' = p/(p-1)``):

    W_i(a)  = ∫_{B(e_i, a)} w_i
    K_i(a)  = ∫_{B(e_i, a)} r_i^{Q_i p'} W_i^{-p'} w_i
    T_i(a)  = ∫_{G_i \\ B(e_i, a)} r_i^{α_i p'} W_i^{-p'} w_i

and ``V[R1, R2; k1, k2](a1, a2)`` is the mass of ``r1^k1 r2^k2 v`` over
``R1(a1) x R2(a2)``, each ``R`` a ball or its complement.
"""

from __future__ import annotations

import logging
from typing import List, Literal, Optional, Sequence, Tuple

import numpy as np

from schemas.report import ConditionReport, DoublingReport

from ..conditions import ExponentPair, doubling_check, dual_density_table, moment_mass, table_factor
from ..errors import ArgumentError, PreconditionError
from ..geometry import ProductGeometry
from ..radial import RadialWeight
from ..scan import AxisFactor, Factor, JointFactor, scan_supremum_2d
from ..settings import Settings, current_settings
from .surfaces import ProductWeight, SeparableSurface, as_product_weight

logger = logging.getLogger(__name__)

HardyVariant = Literal["i", "ii", "iii", "iv"]

# (v regions, w^{1-p'} regions) per part of the product Hardy criterion
_PRODUCT_HARDY_REGIONS = {
    "i": (("tail", "tail"), ("ball", "ball")),
    "ii": (("ball", "ball"), ("tail", "tail")),
    "iii": (("tail", "ball"), ("ball", "tail")),
    "iv": (("ball", "tail"), ("tail", "ball")),
}


def _extra(*weights) -> Tuple[List[float], List[float]]:
    first: List[float] = []
    second: List[float] = []
    for w in weights:
        b1, b2 = w.breakpoints
        first.extend(b1)
        second.extend(b2)
    return first, second


def _joint(v: ProductWeight, geom: ProductGeometry, regions, powers, exponent: float, label: str, scales=(1.0, 1.0)) -> JointFactor:
    return JointFactor(v.mass(geom, regions, powers), exponent, scales, label)


def product_hardy_conditions(
    geom: ProductGeometry,
    pair: ExponentPair,
    w: ProductWeight,
    v: ProductWeight,
    a: float = 1.0,
    b: float = 1.0,
    variant: HardyVariant = "i",
    settings: Settings | None = None,
) -> ConditionReport:
    """Criterion for the product Hardy operators from ``L^p(w)`` to ``L^q(v)``.

    Part i (``H^{a,b}``): ``sup (∫∫_{tail x tail} v)^{1/q} (∫∫_{B(at) x B(bτ)} w^{1-p'})^{1/p'}``;
    parts ii-iv swap the regions per operator.
    """
    if variant not in _PRODUCT_HARDY_REGIONS:
        raise ArgumentError(f"unknown variant {variant!r}")
    if a <= 0 or b <= 0:
        raise ArgumentError("dilations must be positive")
    w = as_product_weight(w)
    v = as_product_weight(v, allow_vanishing=True)
    if not (w.is_separable or v.is_separable):
        raise PreconditionError("product_form", "either w or v must be a product of one-variable weights")
    v_regions, u_regions = _PRODUCT_HARDY_REGIONS[variant]
    u = w.pow(1.0 - pair.p_prime)
    factors = [
        _joint(v, geom, v_regions, (0.0, 0.0), 1.0 / pair.q, "v"),
        _joint(u, geom, u_regions, (0.0, 0.0), 1.0 / pair.p_prime, "w^{1-p'}", (a, b)),
    ]
    bw1, bw2 = _extra(w)
    bv1, bv2 = _extra(v)
    extra = (bv1 + [x / a for x in bw1], bv2 + [x / b for x in bw2])
    return scan_supremum_2d(f"product_hardy_{variant}", factors, settings, extra)


class _AxisData:
    """Per-axis masses of a product weight factor."""

    def __init__(self, geom, w: RadialWeight, p: float, alpha: Optional[float], settings: Settings | None) -> None:
        pp = p / (p - 1.0)
        self.W = moment_mass(geom, w)
        self.K = dual_density_table(geom, w, p, geom.Q * pp, settings)
        self.T = dual_density_table(geom, w, p, alpha * pp, settings) if alpha is not None else None


def double_hardy_cone_conditions(
    geom: ProductGeometry,
    pair: ExponentPair,
    w: ProductWeight,
    v: ProductWeight,
    settings: Settings | None = None,
) -> List[ConditionReport]:
    """The four conditions for ``H^{1,1}`` on the bi-decreasing cone.

    i:   ``(W1 W2)^{-1/p} V[B, B; Q1 q, Q2 q]^{1/q}``
    ii:  ``(K1 K2)^{1/p'} V[G\\B, G\\B]^{1/q}``
    iii: ``W1^{-1/p} K2^{1/p'} V[B, G\\B; Q1 q, 0]^{1/q}``
    iv:  ``K1^{1/p'} W2^{-1/p} V[G\\B, B; 0, Q2 q]^{1/q}``
    """
    w = as_product_weight(w)
    v = as_product_weight(v, allow_vanishing=True)
    w1, w2 = w.require_infinite_axis_masses(geom, settings)
    p, q, pp = pair.p, pair.q, pair.p_prime
    Q1, Q2 = geom.first.Q, geom.second.Q
    d1 = _AxisData(geom.first, w1, p, None, settings)
    d2 = _AxisData(geom.second, w2, p, None, settings)
    extra = _extra(w, v)

    def W(i: int, d: _AxisData) -> AxisFactor:
        return AxisFactor(Factor(d.W, -1.0 / p, label=f"W{i}"), i)

    def K(i: int, d: _AxisData) -> AxisFactor:
        return AxisFactor(table_factor(d.K, "ball", 1.0 / pp, label=f"K{i}"), i)

    specs = {
        "i": [W(1, d1), W(2, d2), _joint(v, geom, ("ball", "ball"), (Q1 * q, Q2 * q), 1.0 / q, "v")],
        "ii": [K(1, d1), K(2, d2), _joint(v, geom, ("tail", "tail"), (0.0, 0.0), 1.0 / q, "v")],
        "iii": [W(1, d1), K(2, d2), _joint(v, geom, ("ball", "tail"), (Q1 * q, 0.0), 1.0 / q, "v")],
        "iv": [K(1, d1), W(2, d2), _joint(v, geom, ("tail", "ball"), (0.0, Q2 * q), 1.0 / q, "v")],
    }
    return [scan_supremum_2d(f"double_hardy_{name}", factors, settings, extra) for name, factors in specs.items()]


# --------------------------------------------------------------------------- doubling on products


def doubling_section_check(
    geom: ProductGeometry,
    rho: ProductWeight,
    integrated_axis: int,
    slices: Optional[Sequence[float]] = None,
    settings: Settings | None = None,
) -> DoublingReport:
    """Doubling in one variable uniformly in the other.

    ``integrated_axis=2`` is ``ρ ∈ DC(y)``: ``∫_{B(e2, 2t)} ρ(x, ·) <= c ∫_{B(e2, t)} ρ(x, ·)``
    for every fixed ``x`` on the probe grid. Slices that vanish identically
    are skipped.
    """
    if integrated_axis not in (1, 2):
        raise ArgumentError(f"axis must be 1 or 2, got {integrated_axis}")
    s = settings or current_settings()
    rho = as_product_weight(rho, allow_vanishing=True)
    fixed_axis = 2 if integrated_axis == 1 else 1
    label = f"DC_section({'x' if integrated_axis == 1 else 'y'})"
    surface = rho.surface
    if isinstance(surface, SeparableSurface):
        # every nonvanishing slice is a multiple of the same profile
        f1, f2 = surface.factors()
        profile = f1 if integrated_axis == 1 else f2
        rep = doubling_check(geom.axis(integrated_axis), profile, "DC", settings=s)
        return DoublingReport(
            weight_class=label,
            constant_b=rep.constant_b,
            member=rep.member,
            argmax=rep.argmax,
            notes=["separable weight: slices are proportional"] + rep.notes,
        )
    if slices is None:
        probe = np.geomspace(s.output_t_min, s.output_t_max, 17).tolist()
        probe += [b * c for b in rho.breakpoints[fixed_axis - 1] for c in (0.5, 1.5)]
        slices = sorted(set(probe))
    worst, member, argmax, notes = 1.0, "true", [], []
    g = geom.axis(integrated_axis)
    for x in slices:
        profile = rho.slice(fixed_axis, x)
        if not np.any(np.asarray(profile(np.geomspace(s.t_min, s.t_max, 64))) > 0):
            continue
        rep = doubling_check(g, profile, "DC", settings=s)
        if rep.member == "false":
            member = "false"
        elif rep.member == "indeterminate" and member == "true":
            member = "indeterminate"
        if rep.constant_b > worst:
            worst, argmax = rep.constant_b, [float(x)] + rep.argmax
    if member == "true":
        notes.append(f"checked {len(slices)} slices")
    return DoublingReport(weight_class=label, constant_b=worst, member=member, argmax=argmax, notes=notes)


def product_riesz_hypothesis_branch(
    geom: ProductGeometry,
    pair: ExponentPair,
    alpha1: float,
    alpha2: float,
    w: ProductWeight,
    v: ProductWeight,
    settings: Settings | None = None,
) -> Tuple[str, List[DoublingReport]]:
    """``"w"`` when ``w_i ∈ DC^{α_i,p}`` on both axes, ``"v"`` when ``v ∈ DC(x) ∩ DC(y)``, else ``"unverified"``."""
    w = as_product_weight(w)
    v = as_product_weight(v, allow_vanishing=True)
    w1, w2 = w.factors()
    reports: List[DoublingReport] = []
    if alpha1 < geom.first.Q / pair.p and alpha2 < geom.second.Q / pair.p:
        r1 = doubling_check(geom.first, w1, "DC_gamma_p", gamma=alpha1, p=pair.p, settings=settings)
        r2 = doubling_check(geom.second, w2, "DC_gamma_p", gamma=alpha2, p=pair.p, settings=settings)
        reports += [r1, r2]
        if r1.member == "true" and r2.member == "true":
            return "w", reports
    rx = doubling_section_check(geom, v, 1, settings=settings)
    ry = doubling_section_check(geom, v, 2, settings=settings)
    reports += [rx, ry]
    if rx.member == "true" and ry.member == "true":
        return "v", reports
    return "unverified", reports


def product_riesz_conditions(
    geom: ProductGeometry,
    pair: ExponentPair,
    alpha1: float,
    alpha2: float,
    w: ProductWeight,
    v: ProductWeight,
    settings: Settings | None = None,
) -> List[ConditionReport]:
    """The nine conditions for ``I_{α1,α2}`` on the bi-decreasing cone.

    Raises ``PreconditionError("doubling")`` when neither doubling branch can
    be verified; the verified branch is recorded in every report's notes.
    """
    for i, alpha in ((1, alpha1), (2, alpha2)):
        Q = geom.axis(i).Q
        if not (0.0 < alpha < Q):
            raise ArgumentError(f"alpha{i} must lie in (0, Q{i}={Q:g}), got {alpha}")
    w = as_product_weight(w)
    v = as_product_weight(v, allow_vanishing=True)
    w1, w2 = w.require_infinite_axis_masses(geom, settings)
    branch, _ = product_riesz_hypothesis_branch(geom, pair, alpha1, alpha2, w, v, settings)
    if branch == "unverified":
        raise PreconditionError(
            "doubling",
            "neither w_i in DC^{alpha_i,p} (i=1,2) nor v in DC(x) ∩ DC(y) could be verified",
        )
    notes = [f"doubling branch: {branch}"]
    p, q, pp = pair.p, pair.q, pair.p_prime
    Q1, Q2 = geom.first.Q, geom.second.Q
    d1 = _AxisData(geom.first, w1, p, alpha1, settings)
    d2 = _AxisData(geom.second, w2, p, alpha2, settings)

    def W(i: int) -> AxisFactor:
        d = d1 if i == 1 else d2
        return AxisFactor(Factor(d.W, -1.0 / p, label=f"W{i}"), i)

    def K(i: int) -> AxisFactor:
        d = d1 if i == 1 else d2
        return AxisFactor(table_factor(d.K, "ball", 1.0 / pp, label=f"K{i}"), i)

    def T(i: int) -> AxisFactor:
        d = d1 if i == 1 else d2
        return AxisFactor(table_factor(d.T, "tail", 1.0 / pp, label=f"T{i}"), i)

    def V(r1: str, r2: str, k1: float, k2: float) -> JointFactor:
        return _joint(v, geom, (r1, r2), (k1, k2), 1.0 / q, f"v[{r1},{r2}]")

    a1q, a2q = alpha1 * q, alpha2 * q
    far1, far2 = (alpha1 - Q1) * q, (alpha2 - Q2) * q
    specs = {
        "1": [W(1), W(2), V("ball", "ball", a1q, a2q)],
        "2": [K(1), K(2), V("tail", "tail", far1, far2)],
        "3": [W(1), K(2), V("ball", "tail", a1q, far2)],
        "4": [K(1), W(2), V("tail", "ball", far1, a2q)],
        "5": [T(1), T(2), V("ball", "ball", 0.0, 0.0)],
        "6": [W(1), T(2), V("ball", "ball", a1q, 0.0)],
        "7": [K(1), T(2), V("tail", "ball", far1, 0.0)],
        "8": [T(1), W(2), V("ball", "ball", 0.0, a2q)],
        "9": [T(1), K(2), V("ball", "tail", 0.0, far2)],
    }
    extra = _extra(w, v)
    return [
        scan_supremum_2d(f"product_riesz_{name}", factors, settings, extra, notes)
        for name, factors in specs.items()
    ]


def trace_condition(
    geom: ProductGeometry,
    pair: ExponentPair,
    alpha1: float,
    alpha2: float,
    v: ProductWeight,
    settings: Settings | None = None,
) -> ConditionReport:
    """``sup_{a1,a2} (∫∫_{B x B} v)^{1/q} a1^{α1 - Q1/p} a2^{α2 - Q2/p}``, the trace criterion (``w ≡ 1``)."""
    exponents = []
    for i, alpha in ((1, alpha1), (2, alpha2)):
        Q = geom.axis(i).Q
        if not (0.0 < alpha < Q / pair.p):
            raise PreconditionError("alpha_range", f"need 0 < alpha{i} < Q{i}/p = {Q / pair.p:g}, got {alpha}")
        exponents.append(alpha - Q / pair.p)
    v = as_product_weight(v, allow_vanishing=True)

    def radius(t: np.ndarray) -> np.ndarray:
        return np.asarray(t, dtype=float)

    factors = [
        _joint(v, geom, ("ball", "ball"), (0.0, 0.0), 1.0 / pair.q, "v"),
        AxisFactor(Factor(radius, exponents[0], label="a1"), 1),
        AxisFactor(Factor(radius, exponents[1], label="a2"), 2),
    ]
    return scan_supremum_2d("trace", factors, settings, _extra(v))


__all__ = [
    "double_hardy_cone_conditions",
    "doubling_section_check",
    "product_hardy_conditions",
    "product_riesz_conditions",
    "product_riesz_hypothesis_branch",
    "trace_condition",
]
