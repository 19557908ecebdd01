import csv
import json
import time

import pytest

from ahmass.cli import DEFAULTS, EXIT_CONFIG, EXIT_DIVERGENCE, EXIT_OK, EXIT_TOL, main, resolve_config
from ahmass.errors import ConfigError


def run(tmp_path, command, config=None, *flags, name="out"):
    out = tmp_path / name
    argv = [command, "--out", str(out)]
    if config is not None:
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps(config))
        argv += ["--config", str(path)]
    code = main(argv + list(flags))
    report = json.loads((out / "report.json").read_text()) if (out / "report.json").exists() else None
    return code, report, out


def test_resolve_config_layers(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"n": 4, "metric": {"family": "schwarzschild-ads"}}))
    cfg = resolve_config("mass", path, {"n": 5, "seed": None, "tol": None})
    assert cfg["n"] == 5
    assert cfg["metric"]["family"] == "schwarzschild-ads"
    assert cfg["metric"]["chart"] == DEFAULTS["mass"]["metric"]["chart"]


@pytest.mark.parametrize(
    "config",
    [{"bogus": 1}, {"metric": {"colour": "red"}}, {"n": 2}, {"tol": -1.0}, {"metric": 3}],
)
def test_config_errors(tmp_path, config):
    with pytest.raises(ConfigError):
        path = tmp_path / "c.json"
        path.write_text(json.dumps(config))
        resolve_config("mass", path)


def test_unreadable_config_is_exit_3(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["mass", "--config", str(bad), "--out", str(tmp_path / "o")]) == EXIT_CONFIG
    assert main(["mass", "--dim", "2", "--out", str(tmp_path / "o")]) == EXIT_CONFIG


def test_mass_hyperbolic(tmp_path):
    code, rep, out = run(tmp_path, "mass")
    assert code == EXIT_OK
    assert max(abs(x) for x in rep["m"]) < 1e-6
    assert rep["config"]["quadrature"]["kind"] == "auto"
    rows = list(csv.reader((out / "convergence.csv").open()))
    assert len(rows) == 7
    assert json.loads((out / "timings.json").read_text())["seconds"] > 0


def test_mass_sads_signs(tmp_path):
    code, rep, _ = run(tmp_path, "mass", {"metric": {"family": "schwarzschild-ads", "mass": 1.0}}, name="p")
    assert code == EXIT_OK
    assert rep["m"][0] > 0 and max(abs(x) for x in rep["m"][1:]) < 1e-6
    assert rep["character"] == "timelike-future"
    code, rep, _ = run(tmp_path, "mass", {"metric": {"family": "schwarzschild-ads", "mass": -1.0}}, name="n")
    assert code == EXIT_OK
    assert rep["m"][0] < 0 and rep["character"] == "timelike-past"


def test_mass_aspect(tmp_path):
    code, rep, _ = run(tmp_path, "mass", {"metric": {"family": "aspect", "coefficients": [-1.0, 0, 0, 0]}})
    assert code == EXIT_OK and rep["character"] == "timelike-past"
    code, _, _ = run(tmp_path, "mass", {"metric": {"family": "aspect", "coefficients": [1.0]}}, name="bad")
    assert code == EXIT_CONFIG


def test_mass_divergence_exit_4(tmp_path):
    code, rep, _ = run(tmp_path, "mass", {"metric": {"family": "perturbed", "amplitude": 1.0, "sigma": 1.0}})
    assert code == EXIT_DIVERGENCE
    assert rep["passed"] is False and rep["table"]


def test_mass_unknown_family(tmp_path):
    code, _, _ = run(tmp_path, "mass", {"metric": {"family": "kerr"}})
    assert code == EXIT_CONFIG


def test_reports_are_bit_identical(tmp_path):
    cfg = {"metric": {"family": "perturbed", "amplitude": 0.01, "direction": [0.1, 0.2, 0.3]}}
    run(tmp_path, "mass", cfg, "--seed", "7", name="a")
    run(tmp_path, "mass", cfg, "--seed", "7", name="b")
    for f in ("report.json", "convergence.csv"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
    run(tmp_path, "glue", None, "--seed", "3", name="g1")
    run(tmp_path, "glue", None, "--seed", "3", name="g2")
    for f in ("report.json", "trace.csv"):
        assert (tmp_path / "g1" / f).read_bytes() == (tmp_path / "g2" / f).read_bytes()


def test_csv_line_endings(tmp_path):
    _, _, out = run(tmp_path, "glue")
    data = (out / "trace.csv").read_bytes()
    assert b"\r" not in data and data.endswith(b"\n")


def test_verify_default_passes(tmp_path):
    code, rep, _ = run(tmp_path, "verify")
    assert code == EXIT_OK and rep["violations"] == []
    assert {s["name"] for s in rep["suites"]} >= {"kid-residuals", "killing-residuals", "lorentz", "gauss-codazzi"}


def test_verify_corrupted_kid_fails(tmp_path):
    code, rep, _ = run(tmp_path, "verify", {"corrupt_kid": 0.01, "graphs": 5})
    assert code == EXIT_TOL
    assert "kid-residuals" in rep["violations"]


def test_verify_n8_under_a_minute(tmp_path):
    start = time.perf_counter()
    code, _, _ = run(tmp_path, "verify", None, "--dim", "8")
    assert code == EXIT_OK
    assert time.perf_counter() - start < 60


def test_glue_default_n5(tmp_path):
    code, rep, _ = run(tmp_path, "glue")
    assert code == EXIT_OK
    assert rep["threshold"] == pytest.approx(3.141592653589793 / 4)
    assert rep["config"]["correction"]["model"] == "strict-o"


def test_glue_n4_strict_and_borderline(tmp_path):
    code, rep, _ = run(tmp_path, "glue", None, "--dim", "4", name="s")
    assert code == EXIT_OK and rep["remainder_decays"]
    code, rep, _ = run(tmp_path, "glue", {"correction": {"model": "rate", "rate": 2.0}}, "--dim", "4", name="b")
    assert code in (EXIT_OK, EXIT_TOL)
    assert rep["remainder_decays"] is False


def test_glue_none_found_exit_2(tmp_path):
    cfg = {"correction": {"model": "rate", "rate": 0.0, "C": 1000.0}}
    code, rep, _ = run(tmp_path, "glue", cfg, "--dim", "3", "--seed", "1")
    assert code == EXIT_TOL and rep["threshold"] == "none found"


def test_glue_bad_scenario_exit_3(tmp_path):
    code, _, _ = run(tmp_path, "glue", {"base": [1.0, 2.0, 0, 0, 0, 0]})
    assert code == EXIT_CONFIG
    code, _, _ = run(tmp_path, "glue", {"correction": {"model": "strict-o", "eta": 0.0}}, name="e")
    assert code == EXIT_CONFIG


@pytest.mark.parametrize("family", ["random-graphs", "hyperboloid", "interpolating", "hyperbolic", "shifted-hyperbolic"])
def test_constraints_families(tmp_path, family):
    code, rep, out = run(tmp_path, "constraints", {"family": family, "count": 5})
    assert code == EXIT_OK and rep["dec_everywhere"]
    header = (out / "constraints.csv").read_text().split("\n")[0]
    assert header == "x0,x1,x2,rho,J_norm,dec"


def test_boost_demo(tmp_path):
    code, rep, out = run(tmp_path, "boost-demo")
    assert code == EXIT_OK
    assert [c["eps"] for c in rep["caps"]] == [0.3, 0.1, 0.03]
    assert all(c["max_abs_image_xn"] < 1e-10 for c in rep["caps"])
    assert len((out / "boost.csv").read_text().strip().split("\n")) == 1 + 3 * 16
    code, _, _ = run(tmp_path, "boost-demo", {"eps": [2.0]}, name="bad")
    assert code == EXIT_CONFIG
