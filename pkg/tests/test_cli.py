import json
import logging

import pytest

from singkit.cli import main


@pytest.fixture(autouse=True)
def _drop_log_handlers():
    yield
    root = logging.getLogger()
    for handler in list(root.handlers):
        if getattr(handler, "_singkit", False):
            root.removeHandler(handler)


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run_cli(capsys, *argv)
    return code, json.loads(out)


def test_series_report(capsys):
    code, payload = run_json(capsys, "series", "--model", "phiH", "--n", "3", "--terms", "8")
    assert code == 0
    assert payload["success"] is True
    assert payload["data"]["coeffs"][0] == "1/6"
    config = payload["metadata"]["config"]
    assert config["subcommand"] == "series"
    assert config["params"]["n"] == 3
    assert "threads" not in config


def test_series_artifact_goes_to_out(capsys, tmp_path):
    target = tmp_path / "phiH1.json"
    code, payload = run_json(capsys, "series", "--model", "phiH1", "--terms", "10", "--out", str(target))
    assert code == 0
    assert payload["data"] == {"path": str(target)}
    written = json.loads(target.read_text())
    assert written["coeffs"][:3] == ["1", "4", "16"]
    assert written["config"]["subcommand"] == "series"


def test_missing_parameter_is_bad_input(capsys):
    code, payload = run_json(capsys, "series", "--model", "phiH", "--terms", "8")
    assert code == 2
    assert payload["success"] is False
    assert payload["error"]["code"] == "INVALID_INPUT"


def test_invalid_thread_count_is_bad_input(capsys):
    code, payload = run_json(capsys, "nickelian", "--n", "2", "--threads", "0")
    assert code == 2
    assert payload["error"]["code"] == "INVALID_INPUT"


def test_csv_needs_a_point_cloud(capsys):
    code, _ = run_cli(capsys, "series", "--model", "phiH1", "--terms", "4", "--format", "csv")
    assert code == 2


def test_fit_then_apply_through_files(capsys, tmp_path):
    series = tmp_path / "s.json"
    operator = tmp_path / "L.json"
    assert run_cli(capsys, "series", "--model", "phiH1", "--terms", "30", "--out", str(series))[0] == 0
    code, _ = run_cli(capsys, "fit", "--series", str(series), "--order", "1", "--degree", "1",
                      "--out", str(operator))
    assert code == 0
    assert json.loads(operator.read_text())["order"] == 1
    code, payload = run_json(capsys, "apply", "--operator", str(operator), "--series", str(series))
    assert code == 0
    assert payload["data"][0]["check"] == "residual:zero"


def test_landau_golden_comparison(capsys):
    code, payload = run_json(capsys, "landau", "--n", "3", "--golden")
    assert code == 0
    assert [c["check"] for c in payload["data"]] == ["landau:n=3:equal"]
    assert payload["metadata"]["result"][0]["n"] == 3


def test_output_does_not_depend_on_thread_count(capsys):
    one = run_cli(capsys, "landau", "--n", "3", "4", "--threads", "1")[1]
    two = run_cli(capsys, "landau", "--n", "3", "4", "--threads", "2")[1]
    assert one == two


def test_nickelian_csv(capsys):
    code, out = run_cli(capsys, "nickelian", "--n", "2", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "re,im,n,family,p1,p2,k"
    assert all(line.split(",")[3] == "nickelian" for line in lines[1:])


def test_plot_defaults_to_svg(capsys):
    code, out = run_cli(capsys, "plot", "--kind", "nickelian", "--n-max", "2")
    assert code == 0
    assert out.startswith("<svg")


def test_crescent_reports_half_planes(capsys):
    code, payload = run_json(capsys, "crescent", "--k", "2", "--n-max", "5")
    assert code == 0
    assert payload["data"]["half_planes"]["left"] == 0
    assert len(payload["data"]["points"]) == payload["data"]["count"]


def test_sorokin_verification(capsys):
    code, payload = run_json(capsys, "sorokin", "--n", "1", "--terms", "30", "--verify")
    assert code == 0
    assert all(c["check"].startswith("n=1:") for c in payload["data"])


def test_pretty_output(capsys):
    code, out = run_cli(capsys, "pinch", "--k1", "2", "--k2", "1", "--format", "pretty")
    assert code == 0
    assert out.strip() == "(1+3*w+4*w^2)"


def test_only_plot_defaults_to_svg(capsys):
    assert run_cli(capsys, "plot", "--kind", "nickelian", "--n-max", "2")[1].startswith("<svg")
    code, payload = run_json(capsys, "landau", "--n", "4")
    assert code == 0
    assert payload["success"] is True
    assert payload["data"][0]["n"] == 4
    code, payload = run_json(capsys, "pinch", "--k1", "2", "--k2", "1")
    assert code == 0
    assert payload["data"]["k1"] == 2 and payload["data"]["points"]
