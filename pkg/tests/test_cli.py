import csv
import io
import json
import math

import pytest

from sparsewiener.cli import OUTPUT_DIR_ENV, run
from sparsewiener.rates import RateReport
from sparsewiener.spectral import SpectralFunction

SMALL_RATE = {
    "scheme": "kantorovich_corrected(1)",
    "spec": {"p": 2, "q": 2, "alpha": 2, "beta": 0, "gamma": 0, "T": 0, "d": 2},
    "levels": {"start": 3, "stop": 8},
    "function": {"family": "block_lacunary", "levels": 11},
    "seed": 4,
}


def _write(path, data):
    path.write_text(json.dumps(data))
    return str(path)


def _csv_rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_grid_members(capsys):
    assert run(["grid", "--dim", "2", "--n", "2", "--T", "0", "--emit", "members"]) == 0
    rows = _csv_rows(capsys.readouterr().out)
    assert rows[0] == ["k_1", "k_2"]
    assert len(rows[1:]) == 6


def test_grid_points_and_counts(capsys):
    assert run(["grid", "--dim", "2", "--n", "1", "--emit", "points"]) == 0
    rows = _csv_rows(capsys.readouterr().out)[1:]
    assert sorted(map(tuple, rows)) == [("0/1", "0/1"), ("0/1", "1/2"), ("1/2", "0/1")]
    assert run(["grid", "--dim", "2", "--n", "2", "--emit", "counts"]) == 0
    assert _csv_rows(capsys.readouterr().out)[1][:2] == ["6", "17"]


def test_grid_energy_set(capsys):
    assert run(["grid", "--dim", "2", "--energy", "2,0,1,0.5,0", "--xi", "3"]) == 0
    energy = _csv_rows(capsys.readouterr().out)[1:]
    assert run(["grid", "--dim", "2", "--n", "3", "--T", str(1 / 3)]) == 0
    assert energy == _csv_rows(capsys.readouterr().out)[1:]


def test_grid_rejects_bad_T(capsys):
    assert run(["grid", "--dim", "2", "--n", "2", "--T", "1.5"]) == 2
    assert "T must be" in capsys.readouterr().err


def test_check_conditions(capsys):
    assert run(["check-conditions", "--scheme", "lagrange", "--jmax", "8", "--s", "4"]) == 0
    cert = json.loads(capsys.readouterr().out)
    assert cert["C3"] == 0 and cert["verdict"] == "PASS"
    assert run(["check-conditions", "--scheme", "averaged", "--jmax", "8", "--s", "2.5"]) == 1
    assert run(["check-conditions", "--scheme", "bspline", "--s", "2"]) == 2


def test_missing_config_is_a_config_error(capsys):
    assert run(["rates", "--config", "missing.json"]) == 2
    assert "not found" in capsys.readouterr().err


@pytest.mark.parametrize("patch,needle", [
    ({"spec": {"p": 2, "q": 2, "alpha": 2, "beta": -1, "gamma": 1}}, "gamma - beta"),
    ({"scheme": "averaged"}, "scheme order"),
    ({"colour": 1}, "unknown config keys"),
    ({"levels": [4, 3]}, "increasing"),
    ({"function": {"family": "korobov", "a": 3, "alpha": 2, "p": 1, "cutoff": 8}}, "membership"),
])
def test_invalid_configs_name_the_problem(tmp_path, capsys, patch, needle):
    cfg = dict(SMALL_RATE, **patch)
    assert run(["rates", "--config", _write(tmp_path / "c.json", cfg)]) == 2
    assert needle in capsys.readouterr().err


def test_unknown_subcommand_exits_with_usage_error():
    with pytest.raises(SystemExit) as info:
        run(["frobnicate"])
    assert info.value.code == 2


def test_rates_round_trip_and_determinism(tmp_path):
    cfg = _write(tmp_path / "c.json", SMALL_RATE)
    assert run(["rates", "--config", cfg, "--out", str(tmp_path / "a.json")]) == 0
    assert run(["rates", "--config", cfg, "--out", str(tmp_path / "b.json")]) == 0
    a = (tmp_path / "a.json").read_text()
    assert a == (tmp_path / "b.json").read_text()
    data = json.loads(a)
    assert data["verdict"] == "PASS"
    assert json.loads(RateReport.from_json_dict(data).to_json()) == data


def test_rates_csv_matches_json(tmp_path):
    cfg = _write(tmp_path / "c.json", SMALL_RATE)
    assert run(["rates", "--config", cfg, "--out", str(tmp_path / "r.json")]) == 0
    assert run(["rates", "--config", cfg, "--out", str(tmp_path / "r.csv")]) == 0
    rows = RateReport.rows_from_csv((tmp_path / "r.csv").read_text())
    assert [r["error"] for r in rows] == json.loads((tmp_path / "r.json").read_text())["errors"]


def test_seed_flag_overrides_config(tmp_path):
    cfg = _write(tmp_path / "c.json", SMALL_RATE)
    run(["--seed", "4", "rates", "--config", cfg, "--out", str(tmp_path / "a.json")])
    run(["--seed", "5", "rates", "--config", cfg, "--out", str(tmp_path / "b.json")])
    a = json.loads((tmp_path / "a.json").read_text())
    b = json.loads((tmp_path / "b.json").read_text())
    assert a["meta"]["seed"] == 4 and b["meta"]["seed"] == 5
    assert a["errors"] != b["errors"]


def test_sharpness_config(tmp_path, capsys):
    cfg = {"experiment": "sharpness", "scheme": "kantorovich_corrected(1)",
           "spec": {"p": 1, "q": 1, "alpha": 2, "beta": 0, "gamma": 1, "T": 0.25, "d": 2},
           "levels": [3, 4, 5, 6, 7], "trials": 2}
    assert run(["rates", "--config", _write(tmp_path / "s.json", cfg)]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["verdict"] == "PASS"
    bad = dict(cfg, spec=dict(cfg["spec"], T=0.7))
    assert run(["rates", "--config", _write(tmp_path / "b.json", bad)]) == 2


def test_output_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path / "out"))
    assert run(["grid", "--dim", "1", "--n", "3", "--out", "members.csv"]) == 0
    assert len(_csv_rows((tmp_path / "out" / "members.csv").read_text())) == 5


def test_norm_and_approx(tmp_path, capsys):
    f = SpectralFunction.from_mapping(2, {(1, 0): 1.0, (0, -3): 2j})
    path = _write(tmp_path / "f.json", f.to_json_dict())
    assert run(["norm", "--function", path, "--variant", "iso", "--q", "1", "--gamma", "1"]) == 0
    assert json.loads(capsys.readouterr().out)["norm"] == pytest.approx(2 + 8)
    assert run(["norm", "--function", path, "--variant", "hybrid", "--q", "inf", "--alpha", "1"]) == 0
    assert json.loads(capsys.readouterr().out)["norm"] == pytest.approx(8)
    assert run(["approx", "--scheme", "lagrange", "--n", "3", "--dim", "2", "--function", path]) == 0
    g = SpectralFunction.from_json_dict(json.loads(capsys.readouterr().out))
    assert g.same_as(f)
    assert run(["approx", "--scheme", "lagrange", "--n", "3", "--dim", "3", "--function", path]) == 2


def test_plot_writes_svg(tmp_path):
    pytest.importorskip("matplotlib")
    cfg = _write(tmp_path / "c.json", SMALL_RATE)
    report = tmp_path / "r.json"
    assert run(["rates", "--config", cfg, "--out", str(report)]) == 0
    svg = tmp_path / "r.svg"
    assert run(["rates", "--plot", str(report), "--svg", str(svg)]) == 0
    assert svg.read_text().lstrip().startswith("<?xml")
    assert "<svg" in svg.read_text()


def test_json_outputs_have_no_bare_infinity(tmp_path, capsys):
    assert run(["check-conditions", "--scheme", "averaged_corrected", "--jmax", "6", "--s", "3"]) == 0
    text = capsys.readouterr().out
    assert "Infinity" not in text
    assert json.loads(text)["verdict"] == "PASS"
    assert not any(isinstance(v, float) and math.isinf(v) for v in json.loads(text).values())
