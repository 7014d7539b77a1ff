import math

import numpy as np
import pytest
from scipy import special

from potential_utils.conditions import ExponentPair
from potential_utils.duality import (
    adjoint_criterion_check,
    duality_lhs_maximize,
    duality_rhs,
    dyadic_sequence,
    product_duality_terms,
    tail_hardy_check,
)
from potential_utils.errors import RangeError
from potential_utils.geometry import GroupGeometry
from potential_utils.product.surfaces import ProductWeight, SeparableSurface
from potential_utils.radial import ExponentialProfile, PowerProfile, StepProfile, constant, indicator


def test_rhs_of_ball_indicator(line):
    terms = duality_rhs(line, 2.0, constant(), indicator(1.0))
    assert terms.first == 0.0
    assert terms.second == pytest.approx(2.0, rel=1e-8)
    assert terms.total == pytest.approx(2.0, rel=1e-8)


def test_rhs_first_summand_for_finite_mass(line):
    terms = duality_rhs(line, 2.0, ExponentialProfile(1.0, 1.0), indicator(1.0))
    # ‖w‖_1 = 2, ‖g‖_1 = 2
    assert terms.first == pytest.approx(2.0 / math.sqrt(2.0), rel=1e-9)
    assert terms.second > 0


def test_rhs_of_vanishing_input(line):
    assert duality_rhs(line, 2.0, constant(), StepProfile([1.0], [0.0])) == (0.0, 0.0)


def test_lhs_bracket_for_ball_indicator(line, coarse):
    report = duality_lhs_maximize(line, 2.0, constant(), indicator(1.0), budget=40, seed=3, settings=coarse)
    assert report.regime == "corollary"
    assert report.lhs_lower_bound == pytest.approx(math.sqrt(2.0), rel=1e-6)
    assert report.rhs_value == pytest.approx(2.0, rel=1e-6)
    low, high = report.ratio_bracket
    assert low <= high <= 1.0 + 1e-9
    assert report.evaluations > 0
    assert max(report.witness.values) == pytest.approx(1.0)


def test_lhs_reaches_holder_candidate(line, coarse):
    g = StepProfile([1.0, 2.0, 3.0], [3.0, 2.0, 1.0])
    report = duality_lhs_maximize(line, 2.0, constant(), g, budget=200, seed=0, settings=coarse)
    assert report.lhs_lower_bound == pytest.approx(math.sqrt(28.0), rel=1e-9)


def test_lhs_holder_candidate_for_p_three(line, coarse):
    g = StepProfile([1.0, 2.0, 3.0], [9.0, 4.0, 1.0])
    report = duality_lhs_maximize(line, 3.0, constant(), g, budget=200, seed=0, settings=coarse)
    assert report.lhs_lower_bound == pytest.approx(72.0 ** (2.0 / 3.0), rel=1e-9)


def test_lhs_is_deterministic_for_a_seed(line, coarse):
    g = StepProfile([1.0, 2.0, 3.0], [3.0, 2.0, 1.0])
    first = duality_lhs_maximize(line, 2.0, constant(), g, budget=40, seed=7, settings=coarse)
    again = duality_lhs_maximize(line, 2.0, constant(), g, budget=40, seed=7, settings=coarse)
    assert first.model_dump() == again.model_dump()


def test_tail_hardy_inequality(line):
    lhs, rhs = tail_hardy_check(line, 2.0, constant(), PowerProfile(1.0, -2.0, lower=1.0))
    assert lhs == pytest.approx(16.0, rel=1e-6)
    assert rhs == pytest.approx(8.0, rel=1e-6)
    assert math.sqrt(lhs) <= 2.0 * math.sqrt(rhs) * (1 + 1e-6)


def test_adjoint_criterion_for_identity(line):
    pair = ExponentPair(p=2.0, q=2.0)
    lhs, rhs = adjoint_criterion_check(line, pair, constant(), constant(), lambda g: g, indicator(1.0))
    assert lhs == pytest.approx(2.0, rel=1e-6)
    assert rhs == pytest.approx(math.sqrt(2.0), rel=1e-6)


def test_dyadic_sequence_unbounded(line):
    df = dyadic_sequence(line, constant(), 1.0, 2.0, [-2, -1, 0, 1, 2])
    assert list(df.columns) == ["k", "x", "cumulative", "annulus_mass"]
    np.testing.assert_allclose(df["x"], [2.0 ** (k - 1) for k in range(-2, 3)], rtol=1e-12)
    np.testing.assert_allclose(df["annulus_mass"].iloc[:-1], [2.0 ** k for k in range(-2, 2)], rtol=1e-10)
    assert math.isnan(df["annulus_mass"].iloc[-1])


def test_dyadic_sequence_bounded(line):
    w2 = ExponentialProfile(1.0, -1.0)
    df = dyadic_sequence(line, w2, 1.0, 2.0, [-3, -2, -1, 0])
    expected = [-math.log(1.0 - 2.0 ** k) for k in (-3, -2, -1)]
    np.testing.assert_allclose(df["x"].iloc[:3], expected, rtol=1e-9)
    assert math.isinf(df["x"].iloc[3])
    with pytest.raises(RangeError):
        dyadic_sequence(line, w2, 1.0, 2.0, [1])


def test_dyadic_sequence_rejects_bad_dilation(line):
    with pytest.raises(RangeError):
        dyadic_sequence(line, constant(), 0.0, 2.0, [0])


def test_product_terms_infinite_masses(line_pair):
    w = ProductWeight.product(constant(), constant())
    g = SeparableSurface(indicator(1.0), indicator(1.0))
    terms = product_duality_terms(line_pair, 2.0, w, g)
    assert (terms.I1, terms.I2, terms.I3) == (0.0, 0.0, 0.0)
    assert terms.I4 == pytest.approx(4.0, rel=1e-6)
    assert terms.total == pytest.approx(4.0, rel=1e-6)


def test_product_terms_finite_masses(line_pair):
    w = ProductWeight.product(ExponentialProfile(1.0, 1.0), ExponentialProfile(1.0, 1.0))
    g = SeparableSurface(indicator(1.0), indicator(1.0))
    terms = product_duality_terms(line_pair, 2.0, w, g)
    assert terms.I1 == pytest.approx(2.0, rel=1e-9)
    assert 0 < terms.I2 < math.inf
    assert terms.I2 == pytest.approx(terms.I3, rel=1e-8)


DUALITY_TRIPLES = [
    (1.5, 1, StepProfile([1.0], [1.0])),
    (2.0, 1, StepProfile([0.5, 2.0], [3.0, 1.0])),
    (3.0, 1, StepProfile([1.0, 2.0, 3.0], [3.0, 2.0, 1.0])),
    (4.0, 1, StepProfile([0.2, 1.0, 5.0], [5.0, 1.0, 0.5])),
    (1.5, 2, StepProfile([1.0], [1.0])),
    (2.0, 2, StepProfile([1.0, 2.0], [2.0, 1.0])),
    (3.0, 2, StepProfile([0.5, 1.0, 4.0], [4.0, 2.0, 1.0])),
    (2.5, 2, StepProfile([1.0, 10.0], [1.0, 0.1])),
]


def dual_norm(geom: GroupGeometry, p: float, g: StepProfile) -> float:
    """``‖g‖_{L^{p'}}``, the exact supremum over decreasing ``f`` when ``w ≡ 1``."""
    pp = p / (p - 1.0)
    left, right, values = (part[g.cells[2] > 0] for part in g.cells)
    cells = geom.sigma / geom.Q * (right ** geom.Q - left ** geom.Q)
    return float(np.sum(values ** pp * cells)) ** (1.0 / pp)


@pytest.mark.parametrize("p, n, g", DUALITY_TRIPLES)
def test_duality_bracket_on_closed_form_triples(coarse, p, n, g):
    geom = GroupGeometry.euclidean(n)
    report = duality_lhs_maximize(geom, p, constant(), g, budget=200, seed=0, settings=coarse)
    exact = dual_norm(geom, p, g)
    # the averages of g dominate g and obey Hardy's inequality with constant p
    assert report.lhs_lower_bound == pytest.approx(exact, rel=1e-6)
    assert exact * (1 - 1e-9) <= report.rhs_value <= p * exact * (1 + 1e-6)
    assert 0.2 <= report.lhs_lower_bound / report.rhs_value <= 5.0


@pytest.mark.parametrize("p, n, g", DUALITY_TRIPLES)
def test_duality_bracket_is_stable_under_budget_doubling(coarse, p, n, g):
    geom = GroupGeometry.euclidean(n)
    base = duality_lhs_maximize(geom, p, constant(), g, budget=200, seed=0, settings=coarse)
    doubled = duality_lhs_maximize(geom, p, constant(), g, budget=400, seed=0, settings=coarse)
    assert doubled.lhs_lower_bound == pytest.approx(base.lhs_lower_bound, rel=1e-6)
    assert doubled.rhs_value == base.rhs_value


def _line_indicator(p: float, a: float):
    value = 2.0 ** (p + 1.0) * a ** (p + 1.0) / (p + 1.0)
    return value, value


def _plane_indicator(p: float):
    value = math.pi ** (p + 1.0) / (p + 1.0)
    return value, value


def _line_power_tail(p: float, gamma: float):
    c = 1.0 / (gamma - 1.0)
    m = p * (gamma - 1.0) - 1.0
    return 2.0 * (2.0 * c) ** p * p * (gamma - 1.0) / m, 2.0 ** (p + 1.0) / m


def _line_weighted_indicator(p: float, beta: float):
    lhs = 2.0 ** (p + 1.0) * special.beta(beta + 1.0, p + 1.0)
    rhs = 2.0 ** (p + 1.0) / ((1.0 + beta) ** p * (p + beta + 1.0))
    return lhs, rhs


TAIL_HARDY_SUITE = [
    ("line", 2.0, constant(), indicator(1.0), _line_indicator(2.0, 1.0)),
    ("line", 3.0, constant(), indicator(2.0), _line_indicator(3.0, 2.0)),
    ("plane", 2.0, constant(), indicator(1.0), _plane_indicator(2.0)),
    ("plane", 1.5, constant(), indicator(1.0), _plane_indicator(1.5)),
    ("line", 2.0, constant(), PowerProfile(1.0, -2.0, lower=1.0), _line_power_tail(2.0, 2.0)),
    ("line", 3.0, constant(), PowerProfile(1.0, -2.0, lower=1.0), _line_power_tail(3.0, 2.0)),
    ("line", 2.0, constant(), PowerProfile(1.0, -3.0, lower=1.0), _line_power_tail(2.0, 3.0)),
    ("line", 2.0, PowerProfile(1.0, 0.5), indicator(1.0), _line_weighted_indicator(2.0, 0.5)),
    ("plane", 2.0, PowerProfile(1.0, -1.0), indicator(1.0), (16.0 * math.pi ** 3 / 15.0, 8.0 * math.pi ** 3 / 5.0)),
]


@pytest.mark.parametrize("where, p, w, f, expected", TAIL_HARDY_SUITE)
def test_tail_hardy_suite(request, where, p, w, f, expected):
    geom = request.getfixturevalue(where)
    lhs, rhs = tail_hardy_check(geom, p, w, f)
    assert lhs == pytest.approx(expected[0], rel=1e-6)
    assert rhs == pytest.approx(expected[1], rel=1e-6)
    assert lhs ** (1.0 / p) <= p * rhs ** (1.0 / p) * (1 + 1e-9)


@pytest.mark.parametrize("b", [1.0, 2.0])
def test_dyadic_sequence_over_twenty_one_indices(line, b):
    ks = list(range(-10, 11))
    # w2 = |x|^(-1/2), p = 2: ∫_{B(bx)} w2^{1-p'} = (4/3) (bx)^(3/2)
    df = dyadic_sequence(line, PowerProfile(1.0, -0.5), b, 2.0, ks)
    expected = [(0.75 * 2.0 ** k) ** (2.0 / 3.0) / b for k in ks]
    np.testing.assert_allclose(df["x"], expected, rtol=1e-9)
    np.testing.assert_allclose(df["annulus_mass"].iloc[:-1], [2.0 ** k for k in ks[:-1]], rtol=1e-9)


def test_tail_hardy_sides_scale_with_the_input(plane):
    base = tail_hardy_check(plane, 3.0, constant(), indicator(1.0))
    scaled = tail_hardy_check(plane, 3.0, constant(), indicator(1.0).scaled(2.0))
    assert scaled[0] == pytest.approx(8.0 * base[0], rel=1e-9)
    assert scaled[1] == pytest.approx(8.0 * base[1], rel=1e-9)
