import math

import numpy as np
import pytest
from pydantic import ValidationError

from potential_utils.conditions import (
    ExponentPair,
    doubling_check,
    far_piece_conditions,
    hardy_condition,
    hardy_cone_conditions,
    riesz_conditions,
    riesz_hypothesis_branch,
    tail_identity,
)
from potential_utils.errors import ArgumentError, PreconditionError
from potential_utils.radial import PowerProfile, ShiftedPowerProfile, constant
from potential_utils.scan import combine_logs, end_verdict
from tests.power_oracle import hardy_cone_values, riesz_values

SQUARE = ExponentPair(p=2.0, q=2.0)


def by_name(reports):
    return {r.condition: r for r in reports}


def test_exponent_pair_order():
    assert ExponentPair(p=3.0, q=4.0).p_prime == pytest.approx(1.5)
    with pytest.raises(ValidationError):
        ExponentPair(p=3.0, q=2.0)


def test_riesz_conditions_admissible_pair(line):
    reports = by_name(riesz_conditions(line, SQUARE, 0.25, constant(), PowerProfile(1.0, -0.5)))
    assert reports["riesz_i"].value == pytest.approx(1.0, rel=1e-6)
    assert reports["riesz_ii"].value == pytest.approx(1.0, rel=1e-6)
    assert reports["riesz_iii"].value == pytest.approx(2.0, rel=1e-6)
    assert all(r.finite == "true" for r in reports.values())
    assert "doubling branch: w" in reports["riesz_i"].diagnostics.notes


@pytest.mark.parametrize("alpha, beta", [(0.25, 0.0), (0.25, -0.25), (0.4, 0.5), (0.1, 0.3)])
def test_riesz_conditions_match_power_closed_forms(line, alpha, beta):
    delta = beta - 2 * alpha
    reports = by_name(riesz_conditions(line, SQUARE, alpha, PowerProfile(1.0, beta), PowerProfile(1.0, delta)))
    expected = riesz_values(line, 2.0, 2.0, alpha, beta, delta)
    for name, value in expected.items():
        assert reports[name].value == pytest.approx(value, rel=1e-6)
    # condition ii for power pairs is (1+β)/(1-β)
    assert reports["riesz_ii"].value == pytest.approx((1 + beta) / (1 - beta), rel=1e-6)


def test_riesz_condition_iii_infinite_for_non_integrable_target(line):
    reports = by_name(riesz_conditions(line, SQUARE, 0.5, constant(), PowerProfile(1.0, -1.0)))
    assert reports["riesz_i"].value == pytest.approx(1.0, rel=1e-6)
    assert reports["riesz_iii"].finite == "false"
    assert math.isinf(reports["riesz_iii"].value)


def test_riesz_needs_infinite_domain_mass(line):
    with pytest.raises(PreconditionError) as info:
        riesz_conditions(line, SQUARE, 0.25, ShiftedPowerProfile(1.0, -3.0), constant())
    assert info.value.hypothesis == "infinite_mass"


def test_riesz_order_range(line):
    with pytest.raises(ArgumentError):
        riesz_conditions(line, SQUARE, 1.0, constant(), constant())


@pytest.mark.parametrize("beta", [0.0, 0.5, -0.5])
def test_hardy_cone_conditions_power_weights(line, beta):
    delta = beta - 2.0
    reports = by_name(hardy_cone_conditions(line, SQUARE, PowerProfile(1.0, beta), PowerProfile(1.0, delta)))
    for name, value in hardy_cone_values(line, 2.0, 2.0, beta, delta).items():
        assert reports[name].value == pytest.approx(value, rel=1e-6)
    if beta == 0.0:
        assert reports["hardy_cone_i"].value == pytest.approx(1.0, rel=1e-6)
        assert reports["hardy_cone_ii"].value == pytest.approx(1.0, rel=1e-6)


@pytest.mark.parametrize("a", [1.0, 4.0])
def test_hardy_near_condition(line, a):
    report = hardy_condition(line, SQUARE, constant(), PowerProfile(1.0, -2.0), a=a, variant="near")
    assert report.condition == "hardy_near"
    assert report.value == pytest.approx(2.0 * math.sqrt(a), rel=1e-9)


def test_hardy_rejects_bad_dilation(line):
    with pytest.raises(ArgumentError):
        hardy_condition(line, SQUARE, constant(), constant(), a=0.0)


def test_far_piece_forms(line):
    w, v = constant(), PowerProfile(1.0, -0.5)
    values = {
        form: far_piece_conditions(line, SQUARE, 0.25, w, v, form).value
        for form in ("sufficient", "necessary", "doubling")
    }
    assert values["doubling"] == pytest.approx(2.0, rel=1e-6)
    assert values["sufficient"] == pytest.approx(2.0 * 0.5 ** 0.25, rel=1e-6)
    assert values["necessary"] == pytest.approx(math.sqrt(2.0), rel=1e-6)
    with pytest.raises(ArgumentError):
        far_piece_conditions(line, SQUARE, 0.25, w, v, "middle")


def test_tail_identity(line, plane):
    for geom in (line, plane):
        df = tail_identity(geom, PowerProfile(1.0, -0.5), 2.0, [0.01, 1.0, 100.0])
        assert list(df.columns) == ["t", "lhs", "rhs", "relative_error"]
        assert df["relative_error"].max() < 1e-8


@pytest.mark.parametrize("gamma", [0.0, 1.0, -0.5])
def test_doubling_constant_of_powers(line, gamma):
    report = doubling_check(line, PowerProfile(1.0, gamma))
    assert report.member == "true"
    assert report.constant_b == pytest.approx(2.0 ** (1.0 + gamma), rel=1e-9)


def test_doubling_gamma_p(line):
    report = doubling_check(line, constant(), "DC_gamma_p", gamma=0.25, p=2.0)
    assert report.member == "true"
    assert report.constant_b == pytest.approx(math.sqrt(2.0), rel=1e-6)
    with pytest.raises(PreconditionError):
        doubling_check(line, constant(), "DC_gamma_p", gamma=0.5, p=2.0)


def test_doubling_indeterminate_when_masses_diverge(line):
    report = doubling_check(line, PowerProfile(1.0, -1.0))
    assert report.member == "indeterminate"


def test_hypothesis_branch_falls_back_to_target(line):
    branch, reports = riesz_hypothesis_branch(line, SQUARE, 0.75, constant(), PowerProfile(1.0, -0.5))
    assert branch == "v"
    assert len(reports) == 1


def test_combine_logs_zero_beats_infinity():
    out = combine_logs([np.array([-np.inf, 1.0]), np.array([np.inf, 2.0])])
    assert out[0] == -np.inf
    assert out[1] == pytest.approx(3.0)


def test_end_verdicts():
    assert end_verdict([0.0, 0.0, 0.0], 0.02) == "true"
    assert end_verdict([0.5, 0.5, 0.5], 0.02) == "false"
    assert end_verdict([0.4, 0.2, 0.05], 0.02) == "true"
    assert end_verdict([0.01, 0.01, 0.01], 0.02) == "indeterminate"


def test_single_axis_conditions_scale_with_the_target_weight(line):
    v = ShiftedPowerProfile(1.0, -0.5)
    base = by_name(riesz_conditions(line, SQUARE, 0.25, constant(), v))
    scaled = by_name(riesz_conditions(line, SQUARE, 0.25, constant(), v.scaled(9.0)))
    for name, report in base.items():
        assert math.isfinite(report.value)
        assert scaled[name].value == pytest.approx(3.0 * report.value, rel=1e-9)

    v = ShiftedPowerProfile(1.0, -2.0)
    base = by_name(hardy_cone_conditions(line, SQUARE, constant(), v))
    scaled = by_name(hardy_cone_conditions(line, SQUARE, constant(), v.scaled(9.0)))
    for name, report in base.items():
        assert math.isfinite(report.value)
        assert scaled[name].value == pytest.approx(3.0 * report.value, rel=1e-9)
