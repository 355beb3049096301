import json

import pytest

from indefmetric import cli
from indefmetric.config import default_config_path, load_config, parse_config
from indefmetric.errors import ConfigInvalid, ReportWriteFailed


def default_text():
    return default_config_path().read_text()


def test_default_config_loads():
    cfg = load_config(environ={})
    assert cfg.n_max == 2
    assert set(cfg.lattices) == {"single", "seven"}
    assert len(cfg.lattices["seven"]) == 7
    assert cfg.gauges == ((0.0, 0.0), (0.5, 2.0), (-3.0, 1.0))
    assert [t.name for t in cfg.test_functions] == ["f", "g"]


def test_landau_in_gauge_list_names_field():
    text = default_text().replace("lambda = 0.0, 0.5, -3.0", "lambda = 0.0, 1.0, -3.0")
    with pytest.raises(ConfigInvalid) as exc:
        parse_config(text, environ={})
    assert exc.value.path == "gauge.lambda"
    assert "gauge.lambda" in str(exc.value)


@pytest.mark.parametrize("old,new,path", [
    ("tol_eq = 1e-10", "tol_eq = -1", "tolerances.tol_eq"),
    ("n_max = 2", "n_max = two", "fock.n_max"),
    ("rho = 0.0, 2.0, 1.0", "rho = 0.0, 2.0", "gauge.rho"),
    ("single = 0 0 1", "single = 0 0 0", "lattices.single"),
    ("r_max = 10.0", "r_max = 0.05", "quadrature.r_max"),
])
def test_schema_errors_name_the_field(old, new, path):
    with pytest.raises(ConfigInvalid) as exc:
        parse_config(default_text().replace(old, new), environ={})
    assert exc.value.path == path


def test_env_override():
    cfg = parse_config(default_text(), environ={"INDEFMETRIC_FOCK__N_MAX": "3",
                                                "INDEFMETRIC_TESTFUNCTION_F__WIDTH": "0.5"})
    assert cfg.n_max == 3
    assert cfg.test_functions[0].width == 0.5
    with pytest.raises(ConfigInvalid) as exc:
        parse_config(default_text(), environ={"INDEFMETRIC_TOLERANCES__LOC_TOL": "0"})
    assert exc.value.path == "tolerances.loc_tol"


def test_missing_file():
    with pytest.raises(ConfigInvalid):
        load_config("/nonexistent/run.ini", environ={})


def test_gupta_bleuler_suite_exit_zero(tmp_path, capsys):
    out = tmp_path / "report.json"
    assert cli.main(["--suite", "gupta-bleuler", "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    names = [c["name"] for c in report["checks"]]
    for n in range(1, 6):
        assert any(f".condition{n}_" in name for name in names)
    assert all(c["pass"] for c in report["checks"])
    assert set(report["checks"][0]) >= {"name", "pass", "residual", "tolerance", "wall_time"}


def test_report_deterministic(tmp_path):
    reports = []
    for i in range(2):
        out = tmp_path / f"r{i}.json"
        cli.main(["--suite", "krein", "--out", str(out), "--seed", "7"])
        r = json.loads(out.read_text())
        for c in r["checks"]:
            c.pop("wall_time")
        reports.append(json.dumps(r, sort_keys=True))
    assert reports[0] == reports[1]


def test_exit_code_reflects_failures(tmp_path):
    bad = tmp_path / "bad.ini"
    bad.write_text(default_text().replace("tol_eq = 1e-10", "tol_eq = 1e-40"))
    assert cli.main(["--config", str(bad), "--suite", "krein", "--out", str(tmp_path / "r.json")]) == 1


def test_config_error_exit(tmp_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text(default_text().replace("lambda = 0.0, 0.5, -3.0", "lambda = 1.0"))
    assert cli.main(["--config", str(bad), "--out", str(tmp_path / "r.json")]) == 2
    assert "gauge.lambda" in capsys.readouterr().err


def test_report_write_failure(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(ReportWriteFailed):
        cli.write_report({}, blocker / "sub" / "r.json")
    assert cli.main(["--suite", "krein", "--out", str(blocker / "r.json")]) == 3


def test_unknown_suite():
    with pytest.raises(ConfigInvalid):
        cli.run_suite(load_config(environ={}), "everything")
