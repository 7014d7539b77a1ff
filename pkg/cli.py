import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Dict, List

try:
    from dotenv import load_dotenv
except Exception:  # pragma: no cover - optional dependency

    def load_dotenv() -> None:
        return None


load_dotenv()

from pydantic import ValidationError

from schemas.report import ReportBundle
from schemas.scenario import ScenarioFile, load_scenario_file
from potential_utils.reporting import emit_plot_data, write_bundle, write_conditions_csv
from potential_utils.runner import run_scenario
from potential_utils.settings import Settings, load_settings

logger = logging.getLogger("cli")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCONSISTENT = 2
CONDITIONS_CSV = "conditions.csv"


def _field_path(err: ValidationError) -> str:
    parts = []
    for item in err.errors():
        where = ".".join(str(x) for x in item.get("loc", ())) or "<root>"
        parts.append(f"{where}: {item.get('msg')}")
    return "; ".join(parts)


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    return {
        "jobs": args.jobs,
        "seed": args.seed,
        "grid_density": args.grid_density,
        "t_min": args.tmin,
        "t_max": args.tmax,
        "log_level": args.log_level,
    }


def run_all(config: ScenarioFile, settings: Settings) -> List[ReportBundle]:
    """Run every scenario; results keep the order of the config file."""
    scenarios = config.scenarios
    if settings.jobs <= 1 or len(scenarios) <= 1:
        return [run_scenario(sc, settings) for sc in scenarios]
    with ProcessPoolExecutor(max_workers=settings.jobs) as pool:
        futures = [pool.submit(run_scenario, sc, settings) for sc in scenarios]
        return [fut.result() for fut in futures]


def failed(bundle: ReportBundle) -> bool:
    return bool(bundle.errors) and bundle.skipped is None


def exit_status(bundles: List[ReportBundle]) -> int:
    if any(failed(b) for b in bundles):
        return EXIT_ERROR
    for bundle in bundles:
        if bundle.verdict is not None and not bundle.verdict.consistent:
            return EXIT_INCONSISTENT
    return EXIT_OK


def main() -> int:
    parser = argparse.ArgumentParser(
        description="Check two-weight inequalities for Riesz potentials on radially decreasing cones"
    )
    parser.add_argument("--config", type=Path, required=True, help="Scenario file (JSON or TOML)")
    parser.add_argument("--out", type=Path, required=True, help="Directory for reports")
    parser.add_argument("--jobs", type=int, help="Scenarios run in parallel")
    parser.add_argument("--seed", type=int, help="Seed for randomized searches")
    parser.add_argument("--grid-density", type=int, help="Output grid points per decade")
    parser.add_argument("--tmin", type=float, help="Lower end of the radial grid")
    parser.add_argument("--tmax", type=float, help="Upper end of the radial grid")
    parser.add_argument("--log-level", type=str, help="Logging level (default INFO)")
    parser.add_argument(
        "--plot-data",
        action="store_true",
        help="Also write (parameter, value) CSV series for every trace and scan",
    )
    args = parser.parse_args()

    try:
        config = load_scenario_file(args.config)
        settings = load_settings({**config.settings, **_overrides(args)})
    except ValidationError as err:
        logging.basicConfig(level=logging.INFO)
        logger.error("invalid configuration %s: %s", args.config, _field_path(err))
        return EXIT_ERROR
    except (OSError, ValueError) as err:
        logging.basicConfig(level=logging.INFO)
        logger.error("cannot read configuration %s: %s", args.config, err)
        return EXIT_ERROR

    logging.basicConfig(
        level=getattr(logging, settings.log_level.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    if not config.scenarios:
        logger.warning("no scenarios in %s", args.config)

    try:
        bundles = run_all(config, settings)
    except Exception as err:  # noqa: BLE001
        logger.error("scenario execution failed: %s", err, exc_info=True)
        return EXIT_ERROR

    args.out.mkdir(parents=True, exist_ok=True)
    for bundle in bundles:
        write_bundle(bundle, args.out)
        if args.plot_data:
            emit_plot_data(bundle, args.out / "plot_data")
    write_conditions_csv(bundles, args.out / CONDITIONS_CSV)

    status = exit_status(bundles)
    skipped = [b.scenario for b in bundles if b.skipped]
    if skipped:
        logger.warning("skipped scenarios: %s", ", ".join(skipped))
    if status == EXIT_ERROR:
        logger.error("failed scenarios: %s", ", ".join(b.scenario for b in bundles if failed(b)))
    if status == EXIT_INCONSISTENT:
        logger.error("at least one consistency verdict is false")
    return status


if __name__ == "__main__":
    sys.exit(main())
