from pathlib import Path

import pytest
from pydantic import ValidationError

from schemas.scenario import Scenario, ScenarioFile, load_scenario_file

LINE = {"euclidean": 1}
PAIR = {"first": {"euclidean": 1}, "second": {"euclidean": 1}}
ONE = {"family": "constant", "value": 1.0}


def riesz(**changes):
    data = {
        "name": "r",
        "task": "conditions",
        "theorem": "riesz",
        "geometry": LINE,
        "alpha": 0.25,
        "w": ONE,
        "v": {"family": "power", "scale": 1.0, "exponent": -0.5},
    }
    data.update(changes)
    return data


def test_valid_scenario_defaults():
    sc = Scenario.model_validate(riesz())
    assert sc.p == 2.0
    assert sc.exponent_q == 2.0
    assert not sc.is_product
    assert sc.family == "all"


@pytest.mark.parametrize(
    "changes, fragment",
    [
        ({"theorem": None}, "needs 'theorem'"),
        ({"theorem": "trace"}, "does not match the geometry"),
        ({"alpha": None}, "needs 'alpha'"),
        ({"p": 3.0, "q": 2.0}, "p <= q"),
        ({"w": {"scale": 1.0}}, "'family' key"),
        ({"colour": "red"}, "xtra"),
        ({"task": "sweep", "theorem": "hardy"}, "no ratio sweep"),
        ({"geometry": {"euclidean": 1, "Q": 1.0}}, "euclidean"),
    ],
)
def test_invalid_scenarios(changes, fragment):
    with pytest.raises(ValidationError) as info:
        Scenario.model_validate(riesz(**changes))
    assert fragment in str(info.value)


def test_product_theorems_need_both_orders():
    data = riesz(theorem="trace", geometry=PAIR, w=None, alpha1=0.25, v={"family": "separable", "first": ONE, "second": ONE})
    with pytest.raises(ValidationError):
        Scenario.model_validate(data)
    data["alpha2"] = 0.25
    assert Scenario.model_validate(data).is_product


def test_task_requirements():
    with pytest.raises(ValidationError):
        Scenario.model_validate({"name": "d", "task": "duality", "geometry": LINE, "w": ONE})
    with pytest.raises(ValidationError):
        Scenario.model_validate(
            {"name": "o", "task": "oracle", "geometry": LINE, "operator": "riesz", "f": ONE, "probes": []}
        )


def test_duplicate_names():
    with pytest.raises(ValidationError) as info:
        ScenarioFile.model_validate({"scenarios": [riesz(), riesz()]})
    assert "duplicate" in str(info.value)


def test_load_toml(tmp_path: Path):
    path = tmp_path / "run.toml"
    path.write_text(
        """
[settings]
seed = 3

[[scenarios]]
name = "dual"
task = "duality"
geometry = { euclidean = 1 }
w = { family = "constant", value = 1.0 }
g = { family = "indicator", radius = 1.0 }
"""
    )
    config = load_scenario_file(path)
    assert config.settings == {"seed": 3}
    assert config.scenarios[0].task == "duality"


def test_load_empty_json(tmp_path: Path):
    path = tmp_path / "run.json"
    path.write_text('{"scenarios": []}')
    assert load_scenario_file(path).scenarios == []


def test_shipped_examples_validate():
    for path in sorted(Path("scenarios").glob("*.json")):
        assert load_scenario_file(path).scenarios
