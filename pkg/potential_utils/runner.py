"""Execute one validated scenario and collect everything it produces in a ``ReportBundle``."""

from __future__ import annotations

import logging
from typing import Any, Dict, List, Optional

from schemas.report import ConditionReport, Provenance, ReportBundle
from schemas.scenario import GroupSpec, ProductSpec, Scenario

from . import __version__
from .conditions import (
    ExponentPair,
    far_piece_conditions,
    hardy_condition,
    hardy_cone_conditions,
    riesz_conditions,
)
from .duality import duality_lhs_maximize, product_duality_terms
from .errors import DivergenceError, PreconditionError
from .geometry import GroupGeometry, ProductGeometry
from .operators import OperatorParams
from .product.conditions import (
    double_hardy_cone_conditions,
    product_hardy_conditions,
    product_riesz_conditions,
    trace_condition,
)
from .product.surfaces import surface_from_record
from .radial import profile_from_record
from .settings import Settings, use_settings
from .verify import evaluate_theorem, oracle_comparison

logger = logging.getLogger(__name__)


def build_group(spec: GroupSpec) -> GroupGeometry:
    if spec.euclidean is not None:
        return GroupGeometry.euclidean(spec.euclidean)
    return GroupGeometry(Q=spec.Q, sigma=spec.sigma, c0=spec.c0)


def build_geometry(scenario: Scenario) -> GroupGeometry | ProductGeometry:
    spec = scenario.geometry
    if isinstance(spec, ProductSpec):
        return ProductGeometry(first=build_group(spec.first), second=build_group(spec.second))
    return build_group(spec)


def _object(scenario: Scenario, record: Optional[Dict[str, Any]]):
    if record is None:
        return None
    return surface_from_record(record) if scenario.is_product else profile_from_record(record)


def _branch_note(conditions: List[ConditionReport]) -> List[str]:
    notes = sorted({n for c in conditions for n in c.diagnostics.notes if n.startswith("doubling branch: ")})
    return notes


def _conditions(scenario: Scenario, geom, pair: ExponentPair, w, v, settings: Settings) -> List[ConditionReport]:
    theorem = scenario.theorem
    if theorem == "riesz":
        return riesz_conditions(geom, pair, scenario.alpha, w, v, settings)
    if theorem == "hardy_cone":
        return hardy_cone_conditions(geom, pair, w, v, settings)
    if theorem == "far_piece":
        return [
            far_piece_conditions(geom, pair, scenario.alpha, w, v, form, settings)
            for form in ("sufficient", "necessary", "doubling")
        ]
    if theorem == "hardy":
        return [hardy_condition(geom, pair, w, v, scenario.a, scenario.variant or "near", settings)]
    if theorem == "product_riesz":
        return product_riesz_conditions(geom, pair, scenario.alpha1, scenario.alpha2, w, v, settings)
    if theorem == "trace":
        return [trace_condition(geom, pair, scenario.alpha1, scenario.alpha2, v, settings)]
    if theorem == "product_hardy":
        variant = scenario.variant or "i"
        return [product_hardy_conditions(geom, pair, w, v, scenario.a, scenario.b, variant, settings)]
    return double_hardy_cone_conditions(geom, pair, w, v, settings)


def _fill(bundle: ReportBundle, scenario: Scenario, settings: Settings, seed: int) -> None:
    geom = build_geometry(scenario)
    pair = ExponentPair(p=scenario.p, q=scenario.exponent_q)
    w = _object(scenario, scenario.w)
    v = _object(scenario, scenario.v)

    if scenario.task == "conditions":
        bundle.conditions = _conditions(scenario, geom, pair, w, v, settings)
        bundle.hypotheses = _branch_note(bundle.conditions)
    elif scenario.task == "sweep":
        outcome = evaluate_theorem(
            scenario.theorem,
            geom,
            pair,
            w,
            v,
            alpha=scenario.alpha,
            alpha1=scenario.alpha1,
            alpha2=scenario.alpha2,
            family=scenario.family,
            budget=scenario.budget,
            settings=settings,
        )
        bundle.conditions = outcome.conditions
        bundle.ratio = outcome.ratio
        bundle.verdict = outcome.verdict
        bundle.hypotheses = _branch_note(outcome.conditions)
    elif scenario.task == "duality":
        g = _object(scenario, scenario.g)
        if scenario.is_product:
            terms = product_duality_terms(geom, scenario.p, w, g, settings)
            bundle.product_duality = {**terms._asdict(), "total": terms.total}
        else:
            bundle.duality = duality_lhs_maximize(geom, scenario.p, w, g, scenario.budget, seed, settings)
            bundle.hypotheses = [f"regime: {bundle.duality.regime}"]
    else:
        f = _object(scenario, scenario.f)
        params = OperatorParams(alpha=scenario.alpha, alpha1=scenario.alpha1, alpha2=scenario.alpha2)
        probes = scenario.probes if scenario.is_product else [float(x) for x in scenario.probes]
        bundle.oracle = oracle_comparison(geom, scenario.operator, params, f, probes)


def run_scenario(scenario: Scenario, settings: Settings) -> ReportBundle:
    """Run one scenario.

    A failed hypothesis or a divergent quantity marks the bundle as skipped
    and is recorded in ``errors``. Any other exception is logged and recorded
    in ``errors`` with ``skipped`` left empty, so the batch goes on.
    """
    seed = settings.seed if scenario.seed is None else scenario.seed
    settings = settings.model_copy(update={"seed": seed})
    bundle = ReportBundle(
        scenario=scenario.name,
        task=scenario.task,
        provenance=Provenance(
            tool_version=__version__,
            seed=seed,
            settings=settings.model_dump(mode="json"),
            scenario=scenario.model_dump(mode="json", exclude_none=True),
        ),
    )
    logger.info("scenario %s: %s started", scenario.name, scenario.task)
    try:
        with use_settings(settings):
            _fill(bundle, scenario, settings, seed)
    except PreconditionError as err:
        logger.warning("scenario %s skipped: %s", scenario.name, err)
        bundle.skipped = err.hypothesis
        bundle.errors.append(str(err))
    except DivergenceError as err:
        logger.warning("scenario %s skipped: %s", scenario.name, err)
        bundle.skipped = f"divergence:{err.where}"
        bundle.errors.append(str(err))
    except Exception as err:  # noqa: BLE001
        logger.error("scenario %s failed: %s", scenario.name, err, exc_info=True)
        bundle.errors.append(f"{type(err).__name__}: {err}")
    else:
        logger.info("scenario %s finished", scenario.name)
    return bundle


__all__ = ["build_geometry", "build_group", "run_scenario"]
