import json
import sys
from pathlib import Path

import pandas as pd
import pytest

import cli
from schemas.report import Provenance, ReportBundle

FIXTURES = Path(__file__).parent / "fixtures"


def run(monkeypatch, *args: str) -> int:
    monkeypatch.setattr(sys, "argv", ["cli.py", *args])
    return cli.main()


def test_cli_conditions_run(monkeypatch, tmp_path: Path):
    out = tmp_path / "out"
    status = run(monkeypatch, "--config", str(FIXTURES / "riesz_line.json"), "--out", str(out), "--plot-data")
    assert status == cli.EXIT_OK

    df = pd.read_csv(out / cli.CONDITIONS_CSV)
    row = df[df["condition"] == "riesz_i"].iloc[0]
    assert row["scenario"] == "riesz-line"
    assert row["value"] == pytest.approx(1.0, rel=1e-5)
    assert row["verdict"] == "finite"

    bundle = json.loads((out / "riesz-line.json").read_text())
    assert bundle["hypotheses"] == ["doubling branch: w"]
    assert bundle["provenance"]["settings"]["scan_points"] == 120

    skipped = json.loads((out / "trace-endpoint.json").read_text())
    assert skipped["skipped"] == "alpha_range"
    assert skipped["conditions"] == []
    assert (out / "plot_data" / "riesz-line__scan__riesz_i.csv").exists()


def test_cli_is_deterministic(monkeypatch, tmp_path: Path):
    outputs = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert run(monkeypatch, "--config", str(FIXTURES / "riesz_line.json"), "--out", str(out), "--seed", "11") == 0
        outputs.append((out / cli.CONDITIONS_CSV).read_text())
    assert outputs[0] == outputs[1]


def test_cli_empty_config(monkeypatch, tmp_path: Path):
    out = tmp_path / "out"
    assert run(monkeypatch, "--config", str(FIXTURES / "empty.json"), "--out", str(out)) == cli.EXIT_OK
    assert (out / cli.CONDITIONS_CSV).read_text().strip() == "scenario,condition,value,argmax,verdict"


def test_cli_rejects_malformed_config(monkeypatch, tmp_path: Path):
    out = tmp_path / "out"
    assert run(monkeypatch, "--config", str(FIXTURES / "malformed.json"), "--out", str(out)) == cli.EXIT_ERROR
    assert not out.exists()


def test_cli_missing_config(monkeypatch, tmp_path: Path):
    status = run(monkeypatch, "--config", str(tmp_path / "absent.json"), "--out", str(tmp_path / "out"))
    assert status == cli.EXIT_ERROR


def test_cli_failed_scenario_does_not_stop_the_batch(monkeypatch, tmp_path: Path):
    out = tmp_path / "out"
    status = run(monkeypatch, "--config", str(FIXTURES / "poisoned.json"), "--out", str(out))
    assert status == cli.EXIT_ERROR

    broken = json.loads((out / "abstract-oracle.json").read_text())
    assert broken["skipped"] is None
    assert broken["errors"][0].startswith("ArgumentError")
    assert broken["oracle"] == []

    df = pd.read_csv(out / cli.CONDITIONS_CSV)
    assert set(df["scenario"]) == {"riesz-line"}
    assert "riesz_i" in set(df["condition"])


def test_exit_status_prefers_execution_errors():
    provenance = Provenance(tool_version="0", seed=0, settings={}, scenario={})
    failed = ReportBundle(scenario="a", task="oracle", provenance=provenance, errors=["RuntimeError: boom"])
    skipped = ReportBundle(
        scenario="b", task="conditions", provenance=provenance, errors=["w has finite mass"], skipped="infinite_mass"
    )
    assert cli.exit_status([skipped]) == cli.EXIT_OK
    assert cli.exit_status([skipped, failed]) == cli.EXIT_ERROR
