"""
operators.py
------------
Hardy and Riesz-type operators on ``G1 x G2`` acting on surfaces.

Hardy variants integrate the input over a product of balls and/or ball
complements. The Riesz pieces have product kernels, so on a finite sum of
tensor terms ``Σ C[i, j] B1[i] ⊗ B2[j]`` they are evaluated as
``Σ C[i, j] (T1 B1[i])(t) (T2 B2[j])(τ)`` with the one-dimensional pieces.
"""

from __future__ import annotations

import logging
import math
from typing import Callable, Dict, Literal, Sequence, Tuple

import numpy as np

from ..errors import ArgumentError, DivergenceError, PreconditionError
from ..geometry import ProductGeometry
from ..operators import OperatorParams, riesz_far, riesz_near
from ..radial import ComputedProfile, RadialProfile
from .surfaces import ComputedSurface, Surface

logger = logging.getLogger(__name__)

HardyVariant = Literal["near-near", "far-far", "near-far", "far-near"]
RieszPiece = Literal["JJ", "JS", "SJ", "SS"]

_HARDY_REGIONS: Dict[str, Tuple[str, str]] = {
    "near-near": ("ball", "ball"),
    "far-far": ("tail", "tail"),
    "near-far": ("ball", "tail"),
    "far-near": ("tail", "ball"),
}


def _probe_divergence(joint, geom: ProductGeometry, regions: Tuple[str, str], f: Surface) -> None:
    if f.is_separable:
        f1, f2 = f.factors()
        for axis, (profile, region) in enumerate(zip((f1, f2), regions), start=1):
            g = geom.axis(axis)
            lo, hi = (0.0, 1.0) if region == "ball" else (1.0, math.inf)
            if np.isinf(profile.moment(g.Q - 1.0, lo, hi)):
                where = "origin" if region == "ball" else "infinity"
                raise DivergenceError(f"axis{axis}:{where}", message=f"input diverges at the {where} on axis {axis}")
        return
    if np.any(np.isinf(joint(np.array([1.0]), np.array([1.0])))):
        raise DivergenceError("product", message="the iterated integral of the input diverges")


def product_hardy(
    geom: ProductGeometry,
    params: OperatorParams,
    variant: HardyVariant,
    f: Surface,
) -> ComputedSurface:
    """``(t, τ) ↦ ∫∫_{R1(a t) x R2(b τ)} f`` with ``R`` a ball (near) or its complement (far).

    ``near-near`` is ``H^{a,b}``, ``far-far`` is ``H̃^{a,b}``, ``near-far`` is
    ``H_1^{a,b}`` and ``far-near`` is ``H_2^{a,b}``.
    """
    if variant not in _HARDY_REGIONS:
        raise ArgumentError(f"unknown Hardy variant {variant!r}; known: {sorted(_HARDY_REGIONS)}")
    regions = _HARDY_REGIONS[variant]
    joint = f.mass(geom, regions)
    _probe_divergence(joint, geom, regions, f)
    a, b = params.a, params.b
    bp1, bp2 = f.breakpoints
    return ComputedSurface(
        lambda t, tau: joint(a * np.asarray(t, dtype=float), b * np.asarray(tau, dtype=float)),
        (tuple(x / a for x in bp1), tuple(x / b for x in bp2)),
        f"product_hardy[{variant}](a={a:g}, b={b:g})",
    )


_PIECE_OPERATORS: Dict[str, Tuple[Callable, Callable]] = {
    "JJ": (riesz_near, riesz_near),
    "JS": (riesz_near, riesz_far),
    "SJ": (riesz_far, riesz_near),
    "SS": (riesz_far, riesz_far),
}


def _orders(geom: ProductGeometry, params: OperatorParams) -> Tuple[float, float]:
    a1 = params.order(geom.first, "alpha1")
    a2 = params.order(geom.second, "alpha2")
    return a1, a2


def _apply_terms(
    ops: Tuple[Callable, Callable],
    geom: ProductGeometry,
    alphas: Tuple[float, float],
    f: Surface,
) -> Tuple[np.ndarray, Sequence[ComputedProfile], Sequence[ComputedProfile]]:
    if not f.is_bidecreasing():
        raise PreconditionError("decreasing", "product Riesz pieces act on surfaces nonincreasing in each radius")
    C, basis1, basis2 = f.indicator_terms()
    used1 = np.any(C != 0, axis=1)
    used2 = np.any(C != 0, axis=0)
    p1 = OperatorParams(alpha=alphas[0])
    p2 = OperatorParams(alpha=alphas[1])
    out1 = [ops[0](geom.first, p1, b) if used1[i] else None for i, b in enumerate(basis1)]
    out2 = [ops[1](geom.second, p2, b) if used2[j] else None for j, b in enumerate(basis2)]
    return C, out1, out2


def _tensor_sum(C: np.ndarray, out1, out2) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    def evaluate(t: np.ndarray, tau: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float).ravel()
        tau = np.asarray(tau, dtype=float).ravel()
        A = np.stack([o(t) if o is not None else np.zeros_like(t) for o in out1], axis=1)
        B = np.stack([o(tau) if o is not None else np.zeros_like(tau) for o in out2], axis=1)
        return A @ C @ B.T

    return evaluate


def product_riesz_pieces(
    geom: ProductGeometry,
    params: OperatorParams,
    piece: RieszPiece,
    f: Surface,
) -> ComputedSurface:
    """One of ``J⊗J``, ``J⊗S``, ``S⊗J``, ``S⊗S`` applied to a bi-decreasing surface.

    ``J`` integrates over ``B(e_i, 2 c0 r_i)`` and ``S`` over its complement, each
    against ``r_i(· y⁻¹)^(α_i - Q_i)``.
    """
    if piece not in _PIECE_OPERATORS:
        raise ArgumentError(f"unknown piece {piece!r}; known: {sorted(_PIECE_OPERATORS)}")
    alphas = _orders(geom, params)
    C, out1, out2 = _apply_terms(_PIECE_OPERATORS[piece], geom, alphas, f)
    bp = tuple(
        tuple(sorted({b for o in outs if o is not None for b in o.breakpoints})) for outs in (out1, out2)
    )
    return ComputedSurface(_tensor_sum(C, out1, out2), bp, f"product_riesz[{piece}]")


def product_riesz_full(geom: ProductGeometry, params: OperatorParams, f: Surface) -> ComputedSurface:
    """``I_{α1,α2} f`` as the sum of the four pieces."""
    pieces = [product_riesz_pieces(geom, params, name, f) for name in ("JJ", "JS", "SJ", "SS")]
    bp1 = tuple(sorted({b for p in pieces for b in p.breakpoints[0]}))
    bp2 = tuple(sorted({b for p in pieces for b in p.breakpoints[1]}))
    return ComputedSurface(
        lambda t, tau: sum(p(t, tau) for p in pieces),
        (bp1, bp2),
        "product_riesz",
    )


def tensor_operator(
    geom: ProductGeometry,
    op1: Callable[..., RadialProfile],
    params1: OperatorParams,
    op2: Callable[..., RadialProfile],
    params2: OperatorParams,
    f: Surface,
) -> ComputedSurface:
    """``(T1 ⊗ T2) f`` for one-dimensional operators on each axis."""
    C, basis1, basis2 = f.indicator_terms()
    out1 = [op1(geom.first, params1, b) for b in basis1]
    out2 = [op2(geom.second, params2, b) for b in basis2]
    return ComputedSurface(_tensor_sum(C, out1, out2), f.breakpoints, "tensor")


__all__ = [
    "product_hardy",
    "product_riesz_full",
    "product_riesz_pieces",
    "tensor_operator",
]
