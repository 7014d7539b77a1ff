"""Closed-form condition values for pure power weights ``w = s^β``, ``v = s^δ``.

Every mass is ``∫ r^e`` over a ball or a ball complement, so each factor is an
explicit power of ``t``. The helpers return values at one radius; callers pick
exponents for which the product does not depend on ``t``.
"""

from __future__ import annotations

from typing import Dict

from potential_utils.geometry import GroupGeometry


def ball(geom: GroupGeometry, exponent: float, t: float = 1.0) -> float:
    m = exponent + geom.Q
    assert m > 0, "power not integrable at the origin"
    return geom.sigma * t ** m / m


def tail(geom: GroupGeometry, exponent: float, t: float = 1.0) -> float:
    m = exponent + geom.Q
    assert m < 0, "power not integrable at infinity"
    return geom.sigma * t ** m / -m


def _dual(geom: GroupGeometry, beta: float, p: float, c: float):
    """``r^c W^{-p'} w = K r^e`` for ``w = s^β``."""
    pp = p / (p - 1.0)
    K = (geom.sigma / (beta + geom.Q)) ** (-pp)
    return K, c - pp * (beta + geom.Q) + beta


def riesz_values(geom: GroupGeometry, p: float, q: float, alpha: float, beta: float, delta: float, t: float = 1.0) -> Dict[str, float]:
    pp, Q = p / (p - 1.0), geom.Q
    K2, e2 = _dual(geom, beta, p, pp * Q)
    K3, e3 = _dual(geom, beta, p, alpha * pp)
    return {
        "riesz_i": ball(geom, beta, t) ** (-1.0 / p) * ball(geom, alpha * q + delta, t) ** (1.0 / q),
        "riesz_ii": (K2 * ball(geom, e2, t)) ** (1.0 / pp) * tail(geom, (alpha - Q) * q + delta, t) ** (1.0 / q),
        "riesz_iii": ball(geom, delta, t) ** (1.0 / q) * (K3 * tail(geom, e3, t)) ** (1.0 / pp),
    }


def hardy_cone_values(geom: GroupGeometry, p: float, q: float, beta: float, delta: float, t: float = 1.0) -> Dict[str, float]:
    pp, Q = p / (p - 1.0), geom.Q
    K, e = _dual(geom, beta, p, pp * Q)
    return {
        "hardy_cone_i": ball(geom, beta, t) ** (-1.0 / p) * ball(geom, delta + Q * q, t) ** (1.0 / q),
        "hardy_cone_ii": (K * ball(geom, e, t)) ** (1.0 / pp) * tail(geom, delta, t) ** (1.0 / q),
    }
