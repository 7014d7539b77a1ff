"""Report files: one JSON bundle per scenario, the combined conditions CSV and plot series.

Every file is written to a temporary sibling first and moved into place, so a
concurrent or interrupted run never leaves a half-written report behind.
"""

from __future__ import annotations

import logging
import os
import re
import tempfile
from pathlib import Path
from typing import Iterable, List

import pandas as pd

from schemas.report import ReportBundle

logger = logging.getLogger(__name__)

CONDITION_COLUMNS = ["scenario", "condition", "value", "argmax", "verdict"]
FLOAT_FORMAT = "%.12g"


def _safe_name(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", name).strip("_") or "scenario"


def write_atomic(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    return path


def write_bundle(bundle: ReportBundle, out_dir: Path) -> Path:
    path = out_dir / f"{_safe_name(bundle.scenario)}.json"
    write_atomic(path, bundle.model_dump_json(indent=2) + "\n")
    logger.debug("wrote %s", path)
    return path


def read_bundle(path: Path) -> ReportBundle:
    return ReportBundle.model_validate_json(path.read_text(encoding="utf-8"))


def _csv(df: pd.DataFrame) -> str:
    return df.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def conditions_frame(bundles: Iterable[ReportBundle]) -> pd.DataFrame:
    """One row per condition: ``scenario, condition, value, argmax, verdict``.

    ``argmax`` joins the maximizing radii with ``;`` (two entries on products).
    """
    rows = []
    for bundle in bundles:
        for report in bundle.conditions:
            rows.append(
                {
                    "scenario": bundle.scenario,
                    "condition": report.condition,
                    "value": report.value,
                    "argmax": ";".join(FLOAT_FORMAT % x for x in report.argmax),
                    "verdict": report.verdict,
                }
            )
    return pd.DataFrame(rows, columns=CONDITION_COLUMNS)


def write_conditions_csv(bundles: Iterable[ReportBundle], path: Path) -> Path:
    return write_atomic(path, _csv(conditions_frame(bundles)))


def emit_plot_data(bundle: ReportBundle, out_dir: Path) -> List[Path]:
    """Write ``(parameter, value)`` series for external plotting.

    One file per family trace (``parameter, ratio``), the witness image on the
    output grid (``t, value``) and one file per condition scan (``t, value``).
    Families and conditions are written in sorted order.
    """
    written: List[Path] = []
    stem = _safe_name(bundle.scenario)
    if bundle.ratio is not None:
        families = sorted({pt.family for pt in bundle.ratio.family_trace})
        for family in families:
            pts = [pt for pt in bundle.ratio.family_trace if pt.family == family]
            df = pd.DataFrame({"parameter": [pt.parameter for pt in pts], "ratio": [pt.ratio for pt in pts]})
            written.append(write_atomic(out_dir / f"{stem}__trace__{_safe_name(family)}.csv", _csv(df)))
        if bundle.ratio.image_t:
            df = pd.DataFrame({"t": bundle.ratio.image_t, "value": bundle.ratio.image_value})
            written.append(write_atomic(out_dir / f"{stem}__image.csv", _csv(df)))
    for report in sorted(bundle.conditions, key=lambda r: r.condition):
        if not report.scan_t or len(report.scan_t) != len(report.scan_value):
            continue
        df = pd.DataFrame({"t": report.scan_t, "value": report.scan_value})
        written.append(write_atomic(out_dir / f"{stem}__scan__{_safe_name(report.condition)}.csv", _csv(df)))
    return written


__all__ = [
    "CONDITION_COLUMNS",
    "conditions_frame",
    "emit_plot_data",
    "read_bundle",
    "write_atomic",
    "write_bundle",
    "write_conditions_csv",
]
