import json

import pytest

from zeromass.cli import RunConfig, ConfigError, main

FAST = ["--grid", "8", "--steps", "4"]


def run(argv, tmp_path):
    return main(list(argv) + ["--out", str(tmp_path)])


def report(tmp_path):
    return json.loads((tmp_path / "report.json").read_text())


def test_verify_algebra(tmp_path, capsys):
    assert run(["verify-algebra"], tmp_path) == 0
    rep = report(tmp_path)
    assert rep["identities_passed"] >= 20 and rep["failed"] == []
    assert rep["tool_version"] and rep["config"]["seed"] == 1


def test_verify_algebra_corrupted_fixture(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"corrupt_fixture": "SIGMA"}))
    assert run(["verify-algebra", "--config", str(cfg)], tmp_path) == 2
    assert "{M1,M1} = 2" in capsys.readouterr().err


def test_verify_equivalence(tmp_path, capsys):
    assert run(["verify-equivalence"], tmp_path) == 0
    rep = report(tmp_path)
    assert rep["claims_confirmed"] == 7
    assert rep["sk_sign_search"]["as_printed_passes"]
    phi = next(c for c in rep["claims"] if c["claim"].startswith("SIGMA x PHI"))
    assert phi["winner"]["convention"]["f0"] == [-1, 1]


def test_unknown_flag_exits_1(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify-algebra", "--bogus"])
    assert exc.value.code == 1
    assert "usage" in capsys.readouterr().err


def test_missing_config_exits_1(tmp_path):
    assert run(["run", "all", "--config", str(tmp_path / "nope.json")], tmp_path) == 1


@pytest.mark.parametrize("payload", ['{"grid": {"n": 7}}', '{"tolerances": {"norm_drift": -1}}',
                                     '{"what": 1}', "not json", '{"band": 99}'])
def test_bad_config_exits_1(tmp_path, payload):
    cfg = tmp_path / "c.json"
    cfg.write_text(payload)
    assert run(["run", "duality", "--config", str(cfg)], tmp_path) == 1


def test_run_all_fast(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"band": 2}))
    assert run(["run", "all", "--config", str(cfg), "--plot"] + FAST, tmp_path) == 0
    rep = report(tmp_path)
    assert set(rep["suites"]) == {"duality", "neutrino", "constraints", "generalized"}
    for suite in rep["suites"].values():
        assert all("tolerance" in c for c in suite["checks"])
    assert (tmp_path / "duality.csv").exists() and (tmp_path / "plot_duality.py").exists()


def test_run_parallel_matches_serial(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"band": 2}))
    args = ["run", "all", "--config", str(cfg)] + FAST
    assert run(args, tmp_path / "a") == 0
    assert run(args + ["--parallel", "2"], tmp_path / "b") == 0
    a, b = report(tmp_path / "a"), report(tmp_path / "b")
    assert a["suites"]["duality"]["checks"] == b["suites"]["duality"]["checks"]


def test_wrong_speed_exits_2(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"band": 2, "c_overrides": {"SIGMA+RS_SPINOR": 1.01}}))
    assert run(["run", "duality", "--config", str(cfg)] + FAST, tmp_path) == 2


def test_export(tmp_path):
    assert run(["export", "--format", "both", "--time", "0.3", "--grid", "16"], tmp_path) == 0
    files = report(tmp_path)["files"]
    assert len(files) == 4 and any(f.endswith(".zmdw") for f in files)


def test_config_from_dict_validates():
    cfg = RunConfig.from_dict({"seed": 3, "grid": {"n": 16}})
    assert cfg.seed == 3 and cfg.grid.n == 16
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"c_overrides": {"SIGMA+RS_SPINOR": -1}})
