import math

import numpy as np
import pytest

from potential_utils.errors import ArgumentError, DivergenceError
from potential_utils.radial import (
    ExponentialProfile,
    PowerProfile,
    ShiftedPowerProfile,
    StepProfile,
    TruncatedPowerProfile,
    as_weight,
    constant,
    cumulative,
    indicator,
    power_integral,
    profile_from_record,
    project_to_decreasing,
    total_mass_is_infinite,
)
from potential_utils.settings import DEFAULT_SETTINGS, Settings, use_settings


def test_power_integral_edges():
    assert power_integral(-0.5, 0.0, 4.0) == pytest.approx(4.0)
    assert power_integral(-1.0, 1.0, math.e) == pytest.approx(1.0)
    assert math.isinf(power_integral(-1.0, 0.0, 1.0))
    assert power_integral(2.0, 3.0, 1.0) == 0.0


def test_step_profile_is_right_continuous():
    step = StepProfile([1.0, 2.0, 3.0], [3.0, 2.0, 1.0], tail=0.5)
    np.testing.assert_array_equal(step(np.array([0.0, 0.99, 1.0, 2.5, 3.0, 10.0])), [3, 3, 2, 1, 0.5, 0.5])
    assert step.is_decreasing()
    assert not StepProfile([1.0, 2.0], [1.0, 2.0]).is_decreasing()


def test_step_moment_matches_cells():
    step = StepProfile([1.0, 2.0, 3.0], [3.0, 2.0, 1.0])
    assert step.moment(0.0) == pytest.approx(6.0)
    assert step.moment(0.0, 0.5, 2.5) == pytest.approx(1.5 + 2.0 + 0.5)
    np.testing.assert_allclose(step.moment(1.0, 0.0, np.array([1.0, 2.0])), [1.5, 1.5 + 3.0])


def test_step_validation():
    with pytest.raises(ArgumentError):
        StepProfile([2.0, 1.0], [1.0, 1.0])
    with pytest.raises(ArgumentError):
        StepProfile([1.0], [-1.0])


def test_truncated_power_moment_exact():
    prof = TruncatedPowerProfile(gamma=0.5, height=4.0, radius=1.0)
    # knee at 1/16: flat part 4/16, power part ∫_{1/16}^1 s^{-1/2} = 2 - 1/2
    assert prof.knee == pytest.approx(1 / 16)
    assert prof.moment(0.0) == pytest.approx(0.25 + 1.5)
    assert prof.breakpoints == (pytest.approx(1 / 16), 1.0)


def test_exponential_moment_exact_and_fallback():
    prof = ExponentialProfile(1.0, 1.0)
    assert prof.moment(1.0) == pytest.approx(1.0)
    assert prof.moment(0.0, 0.0, 2.0) == pytest.approx(1.0 - math.exp(-2.0))
    growing = ExponentialProfile(1.0, -1.0)
    assert growing.moment(0.0, 0.0, 1.0) == pytest.approx(math.e - 1.0, rel=1e-9)


def test_generic_moment_uses_quadrature():
    prof = ShiftedPowerProfile(1.0, -3.0)
    assert prof.moment(0.0) == pytest.approx(0.5, rel=1e-9)


def test_generic_moment_follows_the_run_settings():
    prof = ShiftedPowerProfile(1.0, -3.0)
    run = Settings(t_min=1e-3, t_max=1e3, cells_per_decade=4, gauss_order=4)
    with use_settings(run):
        assert prof.moment(0.0) == pytest.approx(0.5, rel=1e-3)
    assert prof.moment(0.0) == pytest.approx(0.5, rel=1e-9)
    assert {settings for _, settings in prof._tables} == {DEFAULT_SETTINGS, run}


def test_project_to_decreasing_pools_adjacent_violators(line):
    proj = project_to_decreasing(StepProfile([1.0, 2.0, 3.0], [3.0, 1.0, 2.0]), line)
    np.testing.assert_allclose(proj.as_step().values, [3.0, 1.5, 1.5])
    assert proj.is_decreasing()


def test_projection_keeps_tail_as_floor(line):
    proj = project_to_decreasing(StepProfile([1.0, 2.0], [0.2, 0.1], tail=0.5), line)
    np.testing.assert_allclose(proj.as_step().values, [0.5, 0.5])


def test_cumulative_weight(line, plane):
    assert cumulative(line, constant(), 3.0) == pytest.approx(6.0)
    assert cumulative(plane, constant(), 1.0) == pytest.approx(math.pi)
    with pytest.raises(DivergenceError):
        cumulative(line, PowerProfile(1.0, -1.0), 1.0)


def test_domain_weight_must_be_positive():
    with pytest.raises(ArgumentError):
        as_weight(indicator(1.0))
    assert as_weight(indicator(1.0), allow_vanishing=True)(0.5) == 1.0


@pytest.mark.parametrize(
    "profile, expected",
    [
        (constant(), "infinite"),
        (PowerProfile(1.0, -0.5), "infinite"),
        (PowerProfile(1.0, -2.0, lower=1.0), "finite"),
        (ExponentialProfile(1.0, 1.0), "finite"),
        (ShiftedPowerProfile(1.0, -0.5), "infinite"),
        (ShiftedPowerProfile(1.0, -3.0), "finite"),
    ],
)
def test_total_mass_verdict(line, profile, expected):
    assert total_mass_is_infinite(line, profile).verdict == expected


def test_records_round_trip():
    for prof in [
        PowerProfile(2.0, -0.5, 0.0, 3.0),
        TruncatedPowerProfile(0.5, 4.0, 1.0),
        ExponentialProfile(1.0, 2.0),
        StepProfile([1.0, 2.0], [2.0, 1.0], 0.5),
    ]:
        again = profile_from_record(prof.to_record())
        t = np.array([0.3, 1.5, 2.5, 7.0])
        np.testing.assert_allclose(again(t), prof(t))


def test_record_errors():
    with pytest.raises(ArgumentError):
        profile_from_record({"family": "gaussian"})
    with pytest.raises(ArgumentError):
        profile_from_record({"family": "power", "slope": 1.0})
    assert profile_from_record({"family": "indicator", "radius": 2.0})(1.0) == 1.0
