import json
from dataclasses import replace

import numpy as np
import pytest

from epsense import ConfigError, SystemParams
from epsense.cli import main
from epsense.config import RunConfig, SweepSpec, dump, load, parse
from epsense.runner import figdata, run
from epsense.tables import ResultTable, read_csv

SAMPLE = """
# sensing run
[task]
name = sens-sweep

[params]
kappa = 0.1
alpha_in = 420

[sweep]
parameter = delta_omega
start = 1e-5
stop = 1e-3
count = 5
scale = log

[sensing]
scheme = splitting
chi_values = 0, 0.5
"""


def test_parse_sample():
    cfg = parse(SAMPLE)
    assert cfg.task == "sens-sweep"
    assert cfg.sweep == SweepSpec("delta_omega", 1e-5, 1e-3, 5, "log")
    assert cfg.sensing.chi_values == (0.0, 0.5)
    assert cfg.params == SystemParams()


def test_task_override():
    assert parse(SAMPLE, task="ep").task == "ep"


@pytest.mark.parametrize("text, path", [
    ("[params]\nkapa = 1\n", "params.kapa"),
    ("[Params]\nkappa = 1\n", "Params"),
    ("[params]\nKappa = 1\n", "params.Kappa"),
    ("[params]\nkappa = fast\n", "params.kappa"),
    ("[sweep]\nparameter = alpha_in\nstart = 1\nstop = 1\ncount = 3\n", "sweep.stop"),
    ("[sweep]\nparameter = alpha_in\nstart = 1\nstop = 2\ncount = 1\n", "sweep.count"),
    ("[sweep]\nparameter = colour\nstart = 1\nstop = 2\ncount = 3\n", "sweep.parameter"),
    ("[sweep]\nparameter = alpha_in\nstart = 1\n", "sweep.count"),
    ("[task]\nname = plot\n", "task.name"),
    ("[sensing]\nscheme = both\n", "sensing.scheme"),
])
def test_config_errors(text, path):
    with pytest.raises(ConfigError) as exc:
        parse(text)
    assert exc.value.path == path


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load(str(tmp_path / "nope.ini"))


def test_round_trip_defaults():
    cfg = RunConfig(task="ep")
    again = parse(dump(cfg))
    assert again == cfg
    assert run(again).rows == run(cfg).rows
    assert again.digest() == cfg.digest()


def test_round_trip_exact_floats():
    p = replace(SystemParams(), kappa=0.1 + 1e-17 * 3, alpha_in=1 / 3)
    cfg = RunConfig(task="derive", params=p, sweep=SweepSpec("chi", 0.0, 0.3, 4))
    assert parse(dump(cfg)) == cfg


def test_hash_tracks_parameters():
    a = RunConfig(task="ep")
    b = RunConfig(task="ep", params=replace(SystemParams(), kappa=0.11))
    ta, tb = run(a), run(b)
    assert ta.provenance["config_sha256"] == a.digest()
    assert ta.provenance["config_sha256"] != tb.provenance["config_sha256"]


def test_threads_do_not_reorder():
    cfg = parse(SAMPLE)
    assert run(cfg, threads=1).rows == run(cfg, threads=4).rows


def test_ep_task(baseline_ep):
    t = run(RunConfig(task="ep"))
    assert len(t.rows) == 1
    row = dict(zip(t.columns, t.rows[0]))
    assert row["alpha_in_ep"] == pytest.approx(420.1, abs=0.1)
    assert row["error"] == ""


def test_eigen_sweep_default():
    t = run(RunConfig(task="eigen-sweep"))
    assert t.columns[:5] == ["alpha_in", "re_lambda_plus", "re_lambda_minus", "im_lambda_plus", "im_lambda_minus"]
    assert len(t.rows) == 601
    assert t.column("alpha_in")[0] == 0.0 and t.column("alpha_in")[-1] == 600.0
    assert t.failed_rows == 0


def test_row_errors_flagged():
    cfg = RunConfig(task="derive", sweep=SweepSpec("chi", 0.5, 1.5, 3))
    t = run(cfg)
    errs = t.column("error")
    assert errs == ["", "SqueezeDiverges", "SqueezeDiverges"]
    assert t.rows[1][0] == 1.0 and np.isnan(t.rows[1][1])
    # NaN only appears in flagged rows
    for r in t.rows:
        if not r[-1]:
            assert all(np.isfinite(v) for v in r[:-1])


def test_no_convergence_is_a_row_error():
    cfg = RunConfig(task="steady", steady="self-consistent",
                    params=replace(SystemParams(), g=0.05), sweep=SweepSpec("alpha_in", 1e3, 3e3, 2))
    t = run(cfg)
    assert set(t.column("error")) <= {"", "NoConvergence"}


def test_spectra_task():
    t = run(RunConfig(task="spectra"))
    assert t.columns == ["omega", "s11_sq", "s22_sq", "s_out_1", "s_out_2", "error"]
    assert len(t.rows) == 2001


def test_validate_task():
    t = run(RunConfig(task="validate"))
    assert t.column("kappa") == [0.1, 0.3, 1.0, 3.0]
    errs = t.column("error_over_Gamma")
    assert all(a > b for a, b in zip(errs, errs[1:]))


def test_csv_format():
    t = ResultTable("demo", ["x", "label"], provenance={"config_sha256": "abc"})
    t.append((0.1, "a,b"))
    text = t.to_csv()
    prov, cols, rows = read_csv(text)
    assert prov["config_sha256"] == "abc" and prov["table"] == "demo"
    assert cols == ["x", "label"]
    assert rows == [["0.10000000000000001", "a,b"]]
    assert '"a,b"' in text
    with pytest.raises(ValueError):
        t.append((1.0,))


def test_json_nan_is_null():
    t = ResultTable("demo", ["x", "error"])
    t.append((float("nan"), "PoleHit"))
    body = json.loads(t.to_json())
    assert body["rows"] == [[None, "PoleHit"]]


def test_figdata_panels():
    fig2 = figdata("fig2")
    assert sorted(fig2) == ["fig2_a", "fig2_b", "fig2_c", "fig2_d"]
    s1 = figdata("figS1")
    assert sorted(s1) == ["figS1_a", "figS1_b"]
    for t in list(fig2.values()) + list(s1.values()):
        assert t.failed_rows == 0
        assert len(t.provenance["config_sha256"]) == 64
    with pytest.raises(ConfigError):
        figdata("fig9")


def test_fig3_sensitivity_tables():
    tabs = figdata("fig3")
    t = tabs["fig3_ab"]
    assert sorted(set(t.column("chi"))) == [0.0, 0.5, 0.7]
    assert "re_dl_plus_analytic" in t.columns


def test_cli_writes_files(tmp_path, capsys):
    cfg = tmp_path / "run.ini"
    cfg.write_text(SAMPLE)
    assert main(["sens-sweep", "--config", str(cfg), "--out", str(tmp_path), "--threads", "2"]) == 0
    text = (tmp_path / "sens-sweep-splitting.csv").read_text()
    prov, cols, rows = read_csv(text)
    assert prov["task"] == "sens-sweep" and len(rows) == 10


def test_cli_stdout_json(capsys):
    assert main(["ep", "--format", "json"]) == 0
    body = json.loads(capsys.readouterr().out)
    assert body["columns"][0] == "alpha_in_ep"


def test_cli_config_error_exit(tmp_path, capsys):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("[params]\nkapa = 1\n")
    assert main(["ep", "--config", str(cfg)]) == 2
    assert "params.kapa" in capsys.readouterr().err


def test_cli_strict_exit(tmp_path, capsys):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("[params]\nchi_1 = 1.5\n")
    assert main(["derive", "--config", str(cfg)]) == 0
    assert main(["derive", "--config", str(cfg), "--strict"]) == 3


def test_cli_figdata(tmp_path):
    assert main(["figdata", "--figure", "figS1", "--out", str(tmp_path)]) == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == ["figS1_a.csv", "figS1_b.csv"]


def test_negative_log_sweep():
    cfg = parse("[sweep]\nparameter = delta_gamma\nstart = -1e-5\nstop = -1e-3\ncount = 3\nscale = log\n")
    assert cfg.sweep.values() == pytest.approx([-1e-5, -1e-4, -1e-3])
    with pytest.raises(ConfigError):
        parse("[sweep]\nparameter = delta_gamma\nstart = -1e-5\nstop = 1e-3\ncount = 3\nscale = log\n")


def test_shifting_default_sweep_has_readout():
    t = run(RunConfig(task="sens-sweep", sensing=parse("[sensing]\nscheme = shifting\n").sensing))
    num, an = t.column("eta_numeric"), t.column("eta_analytic")
    assert all(e < 0 for e in t.column("epsilon"))
    assert num[0] == pytest.approx(an[0], rel=1e-3)
