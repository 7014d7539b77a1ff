import math

import numpy as np
import pytest

from potential_utils.errors import ArgumentError, PreconditionError
from potential_utils.geometry import GroupGeometry
from potential_utils.operators import (
    OperatorParams,
    far_adjoint_ball_bracket,
    get_operator,
    hardy,
    hardy_dual_weighted,
    hardy_tail,
    kernel_annulus_integral,
    riesz_far,
    riesz_full,
    riesz_near,
    riesz_near_split,
    weighted_hardy_H_alpha,
)
from potential_utils.radial import PowerProfile, StepProfile, indicator

HALF = OperatorParams(alpha=0.5)


def test_hardy_of_ball_indicator(line):
    out = hardy(line, OperatorParams(), indicator(1.0))
    np.testing.assert_allclose(out(np.array([0.5, 3.0])), [1.0, 2.0])
    dilated = hardy(line, OperatorParams(a=2.0), indicator(1.0))
    assert float(dilated(0.25)) == pytest.approx(1.0)


def test_hardy_tail_of_power(line):
    out = hardy_tail(line, OperatorParams(), PowerProfile(1.0, -2.0, lower=1.0))
    np.testing.assert_allclose(out(np.array([0.5, 2.0])), [2.0, 1.0])


def test_weighted_hardy_pair(line):
    f = indicator(1.0)
    assert float(weighted_hardy_H_alpha(line, HALF, f)(4.0)) == pytest.approx(1.0)
    assert float(hardy_dual_weighted(line, HALF, f)(0.25)) == pytest.approx(2.0)


def test_riesz_of_indicator_on_the_line(line):
    out = riesz_full(line, HALF, indicator(1.0))
    assert float(out(0.0)) == pytest.approx(4.0)
    assert float(out(2.0)) == pytest.approx(2.0 * math.sqrt(3.0) - 2.0, rel=1e-12)


def test_near_and_far_add_up(line):
    f = StepProfile([0.5, 1.0, 3.0], [4.0, 2.0, 1.0])
    t = np.array([0.3, 1.7, 5.0])
    total = riesz_near(line, HALF, f)(t) + riesz_far(line, HALF, f)(t)
    np.testing.assert_allclose(total, riesz_full(line, HALF, f)(t), rtol=1e-12)
    inner, shell = riesz_near_split(line, HALF, f)
    np.testing.assert_allclose(inner(t) + shell(t), riesz_near(line, HALF, f)(t), rtol=1e-12)


def test_newtonian_potential_of_the_unit_ball():
    space = GroupGeometry.euclidean(3)
    out = riesz_full(space, OperatorParams(alpha=2.0), indicator(1.0))
    assert float(out(2.0)) == pytest.approx(4 * math.pi / 6.0, rel=1e-8)
    assert float(out(0.5)) == pytest.approx(2 * math.pi * (1 - 0.25 / 3), rel=1e-8)


def test_near_piece_needs_decreasing_input(line):
    with pytest.raises(PreconditionError) as info:
        riesz_near(line, HALF, StepProfile([1.0, 2.0], [0.0, 1.0]))
    assert info.value.hypothesis == "decreasing"


def test_riesz_argument_checks(line):
    with pytest.raises(ArgumentError):
        riesz_full(GroupGeometry(Q=3.0, sigma=1.0), HALF, indicator(1.0))
    with pytest.raises(ArgumentError):
        riesz_full(line, OperatorParams(alpha=1.5), indicator(1.0))
    with pytest.raises(ArgumentError):
        riesz_full(line, OperatorParams(), indicator(1.0))


def test_far_adjoint_bracket_is_two_sided(line):
    df = far_adjoint_ball_bracket(line, HALF, indicator(1.0), [0.5, 1.0, 10.0, 100.0])
    assert list(df.columns) == ["t", "lower", "middle", "upper", "ratio_lower", "ratio_upper"]
    assert np.all(np.isfinite(df["ratio_lower"]))
    assert np.all(df["ratio_upper"] > 0)
    assert np.all(df["ratio_lower"] >= df["ratio_upper"])


def test_kernel_annulus_integral(line):
    assert kernel_annulus_integral(line, 0.5, 4.0, 1.0) == pytest.approx(2 * (math.sqrt(5) - 1))
    assert kernel_annulus_integral(line, 0.5, 1.0, 1.0) == 0.0


def test_operator_registry():
    assert get_operator("riesz") is riesz_full
    with pytest.raises(ArgumentError):
        get_operator("fourier")


def test_riesz_at_the_origin_of_the_plane(plane):
    f = indicator(1.0)
    out = riesz_full(plane, OperatorParams(alpha=1.0), f)
    assert float(out(0.0)) == pytest.approx(2 * math.pi, rel=1e-10)
    assert float(out(1e-9)) == pytest.approx(2 * math.pi, rel=1e-6)
    assert float(riesz_near(plane, OperatorParams(alpha=1.0), f)(0.0)) == 0.0
    assert float(riesz_far(plane, OperatorParams(alpha=1.0), f)(0.0)) == pytest.approx(2 * math.pi, rel=1e-10)


@pytest.mark.parametrize("alpha, expected", [(1.0, 4 * math.pi), (2.0, 2 * math.pi)])
def test_riesz_at_the_origin_of_space(alpha, expected):
    space = GroupGeometry.euclidean(3)
    values = riesz_full(space, OperatorParams(alpha=alpha), indicator(1.0))(np.array([0.0, 1e-7]))
    assert np.all(np.isfinite(values))
    assert values[0] == pytest.approx(expected, rel=1e-10)


def test_riesz_at_the_origin_for_a_power_on_the_line(line):
    out = riesz_full(line, HALF, PowerProfile(1.0, -0.25, upper=1.0))
    # 2 ∫_0^1 s^(-3/4) ds
    assert float(out(0.0)) == pytest.approx(8.0, rel=1e-10)
    assert math.isnan(float(out(-1.0)))
