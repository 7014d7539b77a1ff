import math
from pathlib import Path

import numpy as np
import pytest

from potential_utils.conditions import ExponentPair
from potential_utils.errors import ArgumentError
from potential_utils.geometry import GroupGeometry
from potential_utils.operators import OperatorParams, hardy
from potential_utils.product.surfaces import ProductWeight
from potential_utils.radial import (
    ExponentialProfile,
    PowerProfile,
    ShiftedPowerProfile,
    StepProfile,
    TruncatedPowerProfile,
    constant,
    indicator,
    profile_from_record,
)
from potential_utils.runner import run_scenario
from potential_utils.settings import Settings
from potential_utils.verify import (
    brute_force_oracle,
    evaluate_theorem,
    family_members,
    kernel_bound_constant,
    near_hardy_equivalence_constant,
    oracle_comparison,
    product_ratio_maximize,
    ratio_maximize,
    stepped_truncated_power,
    theorem_consistency_sweep,
    trace_dominance_constant,
    trace_growth,
    trace_necessity_ratio,
    unbounded_verdict,
)
from schemas.report import TracePoint
from schemas.scenario import load_scenario_file
from tests import power_oracle

SQUARE = ExponentPair(p=2.0, q=2.0)
RADII = np.geomspace(1e-3, 1e3, 25)


def test_trace_growth_and_verdict():
    rising = np.sqrt(RADII)
    assert trace_growth(RADII, rising) >= 10.0
    assert trace_growth(RADII, np.ones_like(RADII)) == pytest.approx(1.0)
    assert math.isinf(trace_growth(RADII, np.where(RADII > 1, math.inf, 1.0)))
    assert math.isnan(trace_growth(RADII[:3], np.ones(3)))

    def points(ratios):
        return [TracePoint(family="indicator", parameter=float(x), ratio=float(r)) for x, r in zip(RADII, ratios)]

    assert unbounded_verdict(points(rising)) == "true"
    assert unbounded_verdict(points(np.ones_like(RADII))) == "false"
    assert unbounded_verdict(points(RADII ** 0.1)) == "indeterminate"
    assert unbounded_verdict([]) == "indeterminate"


def test_stepped_truncated_power_is_a_decreasing_minorant():
    prof = stepped_truncated_power(0.5, 100.0)
    assert prof.is_decreasing()
    s = np.geomspace(1e-6, 0.999, 200)
    exact = np.minimum(s ** -0.5, 100.0)
    assert np.all(prof(s) <= exact * (1 + 1e-12))
    assert float(prof(np.array(2.0))) == 0.0
    flat = stepped_truncated_power(0.5, 0.5)
    np.testing.assert_array_equal(flat.values, [0.5])


def test_unknown_family(line):
    with pytest.raises(ArgumentError):
        family_members("gaussian", line, 2.0)


def test_hardy_ratio_is_scale_invariant(line, coarse):
    report = ratio_maximize(
        line, SQUARE, "hardy", constant(), PowerProfile(1.0, -2.0), family="indicator", budget=0, settings=coarse
    )
    assert len(report.family_trace) == 25
    for point in report.family_trace:
        assert point.ratio == pytest.approx(math.sqrt(8.0), rel=1e-5)
    assert report.best_ratio == pytest.approx(math.sqrt(8.0), rel=1e-5)
    assert report.unbounded == "false"
    assert report.witness is not None


def test_riesz_unbounded_pair_is_consistent(line, coarse):
    outcome = evaluate_theorem(
        "riesz", line, SQUARE, constant(), PowerProfile(1.0, -1.0),
        alpha=0.5, family="indicator", budget=0, settings=coarse,
    )
    assert all(math.isinf(pt.ratio) for pt in outcome.ratio.family_trace)
    assert outcome.ratio.unbounded == "true"
    assert outcome.verdict.ratio_bounded == "false"
    assert outcome.verdict.consistent


def test_riesz_bounded_pair_is_consistent(line, coarse):
    outcome = evaluate_theorem(
        "riesz", line, SQUARE, constant(), PowerProfile(1.0, -0.5),
        alpha=0.25, family="indicator", budget=0, settings=coarse,
    )
    ratios = [pt.ratio for pt in outcome.ratio.family_trace]
    assert max(ratios) / min(ratios) < 1.01
    assert outcome.ratio.unbounded == "false"
    assert outcome.verdict.consistent
    assert not outcome.verdict.indeterminate
    assert outcome.verdict.hypothesis_branch == "w"
    assert set(outcome.verdict.conditions_finite) == {"riesz_i", "riesz_ii", "riesz_iii"}


def test_unknown_theorem(line):
    with pytest.raises(ArgumentError):
        evaluate_theorem("fourier", line, SQUARE, constant(), constant())


def test_oracle_on_the_line(line):
    half = OperatorParams(alpha=0.5)
    values = brute_force_oracle(line, "riesz", half, indicator(1.0), [0.0, 2.0])
    assert values[0] == pytest.approx(4.0, rel=1e-7)
    assert values[1] == pytest.approx(2.0 * math.sqrt(3.0) - 2.0, rel=1e-7)


@pytest.mark.parametrize("operator", ["riesz", "riesz_near", "riesz_far"])
def test_operators_agree_with_oracle(line, operator):
    records = oracle_comparison(line, operator, OperatorParams(alpha=0.5), indicator(1.0), [0.5, 3.0])
    assert len(records) == 2
    for record in records:
        assert record.relative_error < 1e-6


def test_oracle_skips_origin_for_pieces(line):
    values = brute_force_oracle(line, "riesz_near", OperatorParams(alpha=0.5), indicator(1.0), [0.0])
    assert math.isnan(values[0])
    with pytest.raises(ArgumentError):
        brute_force_oracle(line, "hardy", OperatorParams(alpha=0.5), indicator(1.0), [1.0])


def test_kernel_bound_constant_is_dilation_invariant(line):
    radii = [0.1, 0.5, 1.0, 4.0, 20.0]
    base = kernel_bound_constant(line, 0.5, radii)
    assert base > 0
    assert kernel_bound_constant(line, 0.5, [10.0 * r for r in radii]) == pytest.approx(base, rel=1e-9)


def test_near_hardy_equivalence_is_dilation_invariant(line):
    radii = [0.1, 0.5, 1.0, 4.0]
    base = near_hardy_equivalence_constant(line, 0.5, [indicator(1.0)], radii)
    scaled = near_hardy_equivalence_constant(line, 0.5, [indicator(3.0)], [3.0 * r for r in radii])
    assert base >= 1.0
    assert scaled == pytest.approx(base, rel=1e-9)


def test_trace_necessity_ratio_is_dilation_invariant(line_pair):
    pair = ExponentPair(p=2.0, q=4.0)
    ones = ProductWeight.product(constant(), constant())
    base = trace_necessity_ratio(line_pair, pair, 0.25, 0.25, ones, 1.0, 1.0)
    assert 0 < base < math.inf
    assert trace_necessity_ratio(line_pair, pair, 0.25, 0.25, ones, 10.0, 10.0) == pytest.approx(base, rel=1e-5)


def test_consistency_sweep_returns_the_verdict(line, coarse):
    verdict = theorem_consistency_sweep(
        "riesz", line, SQUARE, constant(), PowerProfile(1.0, -0.5),
        alpha=0.25, family="indicator", budget=0, settings=coarse,
    )
    assert verdict.consistent
    assert verdict.hypothesis_branch == "w"


def test_product_ratio_is_flat_for_balanced_exponents(line_pair, coarse):
    ones = ProductWeight.product(constant(), constant())
    report = product_ratio_maximize(line_pair, ExponentPair(p=2.0, q=4.0), 0.25, 0.25, ones, ones, settings=coarse)
    ratios = [pt.ratio for pt in report.family_trace]
    assert {pt.family for pt in report.family_trace} == {"indicator_diagonal", "indicator_axis1", "indicator_axis2"}
    assert max(ratios) / min(ratios) < 1.01
    assert report.unbounded == "false"
    assert report.witness["family"] == "separable"


def test_oracle_at_the_origin_of_the_plane(plane):
    values = brute_force_oracle(plane, "riesz", OperatorParams(alpha=1.0), indicator(1.0), [0.0])
    assert values[0] == pytest.approx(2 * math.pi, rel=1e-7)
    assert math.isnan(brute_force_oracle(plane, "riesz_far", OperatorParams(alpha=1.0), indicator(1.0), [0.0])[0])


@pytest.mark.parametrize("density", [4, 8])
def test_witness_image_follows_the_grid_density(line, coarse, density):
    settings = coarse.model_copy(update={"grid_density": density})
    report = ratio_maximize(
        line, SQUARE, "hardy", constant(), PowerProfile(1.0, -2.0), family="indicator", budget=0, settings=settings
    )
    # output grid spans eight decades
    assert len(report.image_t) == 8 * density + 1
    assert report.image_t[0] == pytest.approx(settings.output_t_min)
    witness = profile_from_record(report.witness)
    expected = hardy(line, OperatorParams(), witness)(np.array(report.image_t))
    np.testing.assert_allclose(report.image_value, expected, rtol=1e-12)


AGREEMENT_PROFILES = {
    "ball": indicator(1.0),
    "small_ball": indicator(0.3, 2.0),
    "three_steps": StepProfile([0.5, 1.0, 3.0], [4.0, 2.0, 1.0]),
    "geometric": StepProfile(2.0 ** np.arange(-3, 4), 2.0 ** -np.arange(7)),
    "exponential": ExponentialProfile(1.0, 1.0),
    "steep_exponential": ExponentialProfile(2.0, 3.0),
    "shifted_power": ShiftedPowerProfile(1.0, -2.0),
    "root_singular": PowerProfile(1.0, -0.5, upper=1.0),
    "truncated_power": TruncatedPowerProfile(0.5, 4.0, 2.0),
    "power_tail": PowerProfile(1.0, -1.5, lower=1.0),
}
AGREEMENT_RADII = np.geomspace(0.037, 23.0, 20)


@pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
@pytest.mark.parametrize("name", sorted(AGREEMENT_PROFILES))
def test_riesz_agrees_with_oracle_on_a_grid(line, alpha, name):
    records = oracle_comparison(line, "riesz", OperatorParams(alpha=alpha), AGREEMENT_PROFILES[name], AGREEMENT_RADII)
    assert len(records) == len(AGREEMENT_RADII)
    assert max(r.relative_error for r in records) < 1e-4


@pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
def test_near_hardy_bracket_is_stable_under_grid_doubling(line, alpha):
    profiles = [AGREEMENT_PROFILES[name] for name in ("ball", "three_steps", "geometric")]
    base = near_hardy_equivalence_constant(line, alpha, profiles, settings=Settings(grid_density=64))
    fine = near_hardy_equivalence_constant(line, alpha, profiles, settings=Settings(grid_density=128))
    assert 1.0 <= base <= fine * (1 + 1e-9)
    assert fine / base < 1.05


@pytest.mark.parametrize("n, alpha", [(1, 0.5), (2, 0.5), (2, 1.5)])
def test_kernel_bound_is_stable_under_refinement(n, alpha):
    geom = GroupGeometry.euclidean(n)
    # 79 points halve the spacing of the 40-point grid
    base = kernel_bound_constant(geom, alpha, np.geomspace(1e-2, 1e2, 40))
    refined = kernel_bound_constant(geom, alpha, np.geomspace(1e-2, 1e2, 79))
    assert 0 < base <= refined * (1 + 1e-9)
    assert refined / base < 1.05


# (axis 1, axis 2) single-group Riesz conditions whose product is each A_k
PRODUCT_PIECES = {
    "1": ("riesz_i", "riesz_i"),
    "2": ("riesz_ii", "riesz_ii"),
    "3": ("riesz_i", "riesz_ii"),
    "4": ("riesz_ii", "riesz_i"),
    "5": ("riesz_iii", "riesz_iii"),
    "6": ("riesz_i", "riesz_iii"),
    "7": ("riesz_ii", "riesz_iii"),
    "8": ("riesz_iii", "riesz_i"),
    "9": ("riesz_iii", "riesz_ii"),
}
DOMINANCE_TUPLES = [
    (f1 / p, f2 / p, p, q)
    for p in (1.5, 2.0, 3.0)
    for q in (p, 2.0 * p)
    for f1 in (0.25, 0.5, 0.75)
    for f2 in (0.25, 0.5, 0.75)
]


def balanced_power(p: float, q: float, alpha: float) -> float:
    """Exponent ``δ`` for which every condition with ``w ≡ 1, v = s^δ`` on the line is scale free."""
    return q * (1.0 / p - alpha) - 1.0


def expected_dominance(alpha1: float, alpha2: float, p: float, q: float) -> float:
    axis = GroupGeometry.euclidean(1)
    deltas = [balanced_power(p, q, a) for a in (alpha1, alpha2)]
    values = [power_oracle.riesz_values(axis, p, q, a, 0.0, d) for a, d in zip((alpha1, alpha2), deltas)]
    bound = math.prod(power_oracle.ball(axis, d) ** (1.0 / q) for d in deltas)
    worst = max(values[0][first] * values[1][second] for first, second in PRODUCT_PIECES.values())
    return worst / bound


def separable_power(p: float, q: float, alpha1: float, alpha2: float) -> ProductWeight:
    return ProductWeight.product(
        PowerProfile(1.0, balanced_power(p, q, alpha1)),
        PowerProfile(1.0, balanced_power(p, q, alpha2)),
        allow_vanishing=True,
    )


def test_trace_dominance_over_admissible_tuples(line_pair, coarse):
    assert len(DOMINANCE_TUPLES) >= 50
    constants = []
    for alpha1, alpha2, p, q in DOMINANCE_TUPLES:
        v = separable_power(p, q, alpha1, alpha2)
        value = trace_dominance_constant(line_pair, ExponentPair(p=p, q=q), alpha1, alpha2, v, coarse)
        assert value == pytest.approx(expected_dominance(alpha1, alpha2, p, q), rel=1e-4)
        constants.append(value)
    assert all(0 < c < math.inf for c in constants)


@pytest.mark.parametrize("alpha1, alpha2, p, q", DOMINANCE_TUPLES[::13])
def test_trace_dominance_is_stable_under_refinement(line_pair, coarse, alpha1, alpha2, p, q):
    v = separable_power(p, q, alpha1, alpha2)
    pair = ExponentPair(p=p, q=q)
    base = trace_dominance_constant(line_pair, pair, alpha1, alpha2, v, coarse)
    finer = coarse.model_copy(update={"scan_points_2d": 2 * coarse.scan_points_2d})
    assert trace_dominance_constant(line_pair, pair, alpha1, alpha2, v, finer) == pytest.approx(base, rel=0.1)


SWEEP = load_scenario_file(Path(__file__).parent.parent / "scenarios" / "riesz_consistency_sweep.json")


@pytest.mark.parametrize("scenario", SWEEP.scenarios, ids=lambda sc: sc.name)
def test_shipped_riesz_sweep_is_consistent(scenario, coarse):
    bundle = run_scenario(scenario, coarse)
    assert bundle.errors == []
    assert bundle.verdict.consistent
    verdicts = set(bundle.verdict.conditions_finite.values())
    if scenario.name.startswith("unbalanced"):
        assert "false" in verdicts
    else:
        assert "false" not in verdicts
