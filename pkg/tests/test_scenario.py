import json
import math
from importlib import resources

import jsonschema
import numpy as np
import pytest

from conftest import dense_c, max_abs
from multirabi import Kernel, LadderModel, expm_series, time_series
from multirabi.scenario import (ConfigError, csv_header, load_config, parse_config, render_csv,
                                render_json)

BASE = {
    "n": 3,
    "energies": [0.0, 1.0, 1.8],
    "couplings": [1.0, 1.0],
    "time": {"start": 0.0, "stop": 1.0, "steps": 3},
}


def cfg(**changes):
    data = json.loads(json.dumps(BASE))
    data.update(changes)
    return data


def test_defaults():
    c = parse_config(cfg())
    assert c.kernel == "auto" and not c.normalize_initial and c.initial_level == 0
    assert c.output.format == "csv" and c.output.path is None
    m = c.model()
    assert m.omegas == (1.0, 0.8) and m.phis == (0.0, 0.0)
    assert list(c.time.points()) == [0.0, 0.5, 1.0]


def test_omegas_with_default_e0():
    c = parse_config({k: v for k, v in cfg(omegas=[1.0, 0.8]).items() if k != "energies"})
    assert c.model().energies == (0.0, 1.0, 1.8)
    c = parse_config({k: v for k, v in cfg(omegas=[1.0, 0.8], E0=-2.0).items() if k != "energies"})
    assert c.model().energies == pytest.approx((-2.0, -1.0, -0.2), abs=1e-15)


def test_explicit_energies_and_omegas_may_be_detuned():
    m = parse_config(cfg(omegas=[1.0, 0.9])).model()
    assert m.omegas == (1.0, 0.9)


@pytest.mark.parametrize("changes, field", [
    ({"n": 4}, "couplings"),
    ({"couplings": [1.0, -1.0]}, "couplings"),
    ({"energies": [0.0, 1.0]}, "energies"),
    ({"E0": 1.0}, "E0"),
    ({"phis": [0.0]}, "phis"),
    ({"initial_level": 3}, "initial_level"),
    ({"time": {"start": 0.0, "stop": 1.0, "steps": 0}}, "time.steps"),
    ({"time": {"start": 2.0, "stop": 1.0, "steps": 3}}, "time"),
    ({"time": {"start": 0.0, "stop": 1.0, "steps": 1}}, "time.steps"),
    ({"time": {"start": 0.0, "steps": 3}}, "time.stop"),
    ({"kernel": "krylov"}, "kernel"),
    ({"output": {"format": "xml"}}, "output.format"),
    ({"bogus": 1}, "bogus"),
    ({"n": "3"}, "n"),
    ({"normalize_initial": "yes"}, "normalize_initial"),
])
def test_config_errors_name_the_field(changes, field):
    with pytest.raises(ConfigError, match=f"'{field}'"):
        parse_config(cfg(**changes))


def test_missing_energy_source():
    data = cfg()
    del data["energies"]
    with pytest.raises(ConfigError, match="'energies'"):
        parse_config(data)


def test_bad_json_reports_line(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{\n  "n": 3,\n  "couplings": [1, 1\n}\n')
    with pytest.raises(ConfigError, match="line 4"):
        load_config(p)


def test_model_errors_become_config_errors():
    with pytest.raises(ConfigError):
        parse_config(cfg(energies=[0.0, 2.0, 1.0])).model()


def test_csv_format():
    c = parse_config(cfg())
    ts = time_series(c.model(), c.time.points(), 0, keep_propagators=True)
    text = render_csv(ts, include_propagator=True)
    lines = text.split("\n")
    assert text.endswith("\n") and lines[-1] == ""
    assert lines[0].split(",") == csv_header(3, True)
    assert lines[0].startswith("t,p0,p1,p2,reU00,imU00,reU01")
    row = [float(v) for v in lines[2].split(",")]
    assert row[0] == 0.5
    assert row[1:4] == list(ts.populations[1])
    U = ts.propagators[1]
    assert row[4] == U[0, 0].real and row[5] == U[0, 0].imag
    # 17 significant digits round-trip exactly
    assert all(float(f"{x:.17g}") == x for x in ts.populations.ravel())


def test_json_output_schema_and_round_trip():
    c = parse_config(cfg(output={"format": "json", "include_propagator": True}))
    ts = time_series(c.model(), c.time.points(), 0, keep_propagators=True)
    doc = json.loads(render_json(ts, c, include_propagator=True))
    schema = json.loads(resources.files("multirabi").joinpath("schemas/output.schema.json").read_text())
    jsonschema.validate(doc, schema)
    assert doc["meta"]["n"] == 3 and doc["meta"]["kernel"] == "closed_form"
    assert parse_config(doc["meta"]["config"]) == c
    assert len(doc["rows"]) == 3
    assert len(doc["rows"][1]["propagator"]) == 9
    assert doc["rows"][2]["populations"] == list(ts.populations[2])


def test_golden_file_physics():
    """The shipped golden CSV agrees with the series oracle, not just with itself."""
    from pathlib import Path
    root = Path(__file__).resolve().parents[1]
    c = load_config(root / "configs" / "four_level.json")
    rows = np.loadtxt(root / "tests" / "data" / "four_level_golden.csv", delimiter=",", skiprows=1)
    assert rows.shape == (c.time.steps, 5)
    C = dense_c(c.couplings)
    for row in rows[::20]:
        pops = np.abs(expm_series(C, row[0])[:, 0]) ** 2
        assert max_abs(row[1:], pops) < 1e-10
