import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from jamllr.cli import main, preset_names
from jamllr.codes import read_matrix
from jamllr.gf2 import matmul
from jamllr.harness import CSV_COLUMNS


def rows_of(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def without_wall(path):
    lines = []
    for row in csv.reader(open(path, newline="")):
        lines.append(row[:-1])
    return lines


def test_presets_shipped():
    assert set(preset_names()) >= {
        "paper_fig2_genie.json", "paper_fig3_posterior.json", "paper_fig4_llr.json",
        "paper_fig5_refined.json", "paper_fig6_rlc.json", "paper_fig6_capolar.json",
    }


def test_bler_sweep_preset(tmp_path):
    out = tmp_path / "results.csv"
    rc = main(["bler-sweep", "--config", "paper_fig6_rlc.json", "--seed", "7", "--trials", "2",
               "--threads", "1", "--out", str(out)])
    assert rc == 0
    rows = rows_of(out)
    assert list(rows[0].keys()) == CSV_COLUMNS
    sinrs = [-30.0, -25.0, -20.0, -15.0, -10.0, -5.0, 0.0, 2.0, 4.0, 6.0, 8.0]
    for strategy in ("baseline_awgn", "pointwise", "anchored"):
        got = [float(r["jammer_sinr_db"]) for r in rows if r["strategy"] == strategy]
        assert got == sinrs
    assert {r["master_seed"] for r in rows} == {"7"}


def test_single_strategy_one_row_per_point(tmp_path):
    out = tmp_path / "r.csv"
    rc = main(["bler-sweep", "--config", "paper_fig6_rlc.json", "--trials", "2", "--threads", "1",
               "--strategy", "anchored", "--sinr=-5,5", "--out", str(out)])
    assert rc == 0
    rows = rows_of(out)
    assert [(r["strategy"], r["jammer_sinr_db"]) for r in rows] == [("anchored", "-5.0"),
                                                                    ("anchored", "5.0")]


def test_identical_invocations_identical_output(tmp_path):
    args = ["bler-sweep", "--config", "paper_fig6_capolar.json", "--seed", "3", "--trials", "8",
            "--sinr=-2,3", "--strategy", "baseline_awgn,anchored"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--threads", "1", "--out", str(a)]) == 0
    assert main(args + ["--threads", "3", "--out", str(b)]) == 0
    assert without_wall(a) == without_wall(b)


def test_json_mirror(tmp_path):
    out, js = tmp_path / "r.csv", tmp_path / "r.json"
    assert main(["bler-sweep", "--sinr=6", "--trials", "3", "--out", str(out),
                 "--json", str(js), "--set", "max_queries=500"]) == 0
    doc = json.loads(js.read_text())
    assert doc["config"]["max_queries"] == 500
    assert len(doc["rows"]) == 1


def test_genie_sweep(tmp_path):
    out = tmp_path / "g.csv"
    rc = main(["genie-sweep", "--config", "paper_fig2_genie.json", "--trials", "5",
               "--rates", "0:0;0:0.05;0.4:0", "--out", str(out)])
    assert rc == 0
    assert [r["strategy"] for r in rows_of(out)] == [
        "genie(fp=0,fn=0)", "genie(fp=0,fn=0.05)", "genie(fp=0.4,fn=0)"]


def test_posterior_curves_shape(tmp_path):
    out = tmp_path / "fig3.csv"
    assert main(["posterior-curves", "--snr-a", "12", "--snr-j", "0,2,4,6",
                 "--out", str(out)]) == 0
    rows = rows_of(out)
    for snr in ("0.0", "2.0", "4.0", "6.0"):
        curve = [(float(r["mag"]), float(r["p_j"])) for r in rows if r["snr_j_db"] == snr]
        mags, p = np.array(curve).T
        assert 0.9 <= mags[np.argmin(p)] <= 1.1
        assert np.all(np.diff(p[mags >= 1.5]) > 0)


def test_posterior_curves_refined(tmp_path):
    out = tmp_path / "fig5.csv"
    assert main(["posterior-curves", "--config", "paper_fig5_refined.json", "--frames", "10",
                 "--out", str(out)]) == 0
    states = {r["state"] for r in rows_of(out) if r["curve"] == "refined"}
    assert states == {"A", "J"}


def test_llr_curves(tmp_path):
    out = tmp_path / "fig4.csv"
    assert main(["llr-curves", "--config", "paper_fig4_llr.json", "--out", str(out)]) == 0
    rows = rows_of(out)
    assert rows and {"llr_awgn", "llr_jam", "llr_blended"} <= set(rows[0])
    for r in rows:
        assert abs(float(r["llr_blended"])) <= abs(float(r["llr_awgn"])) + 1e-9


def test_decode_frame(capsys):
    assert main(["decode-frame", "--sinr=300", "--snr-a", "30", "--frame-index", "4"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["queries"] == 1 and doc["block_error"] is False and doc["frame_index"] == 4


@pytest.mark.parametrize("code", ["rlc", "ca_polar"])
def test_make_code(tmp_path, code):
    g, h = tmp_path / "g.txt", tmp_path / "h.txt"
    assert main(["make-code", "--code", code, "--out", str(g), "--parity-out", str(h)]) == 0
    gm, hm = read_matrix(g), read_matrix(h)
    assert gm.shape == (105, 128) and hm.shape == (23, 128)
    assert not matmul(gm, hm.T).any()


def test_unknown_flag_exit_2(capsys):
    assert main(["bler-sweep", "--bogus"]) == 2
    assert "usage" in capsys.readouterr().err


def test_missing_subcommand_exit_2():
    assert main([]) == 2


def test_config_error_reports_line_and_field(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text('{\n  "code": "rlc",\n  "trials": 0\n}\n')
    assert main(["bler-sweep", "--config", str(cfg), "--out", str(tmp_path / "r.csv")]) == 2
    err = capsys.readouterr().err
    assert f"{cfg}:3:" in err and "'trials'" in err


def test_invalid_json_reports_position(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text('{\n  "code": "rlc",\n  trials: 3\n}\n')
    assert main(["bler-sweep", "--config", str(cfg), "--out", str(tmp_path / "r.csv")]) == 2
    assert f"{cfg}:3:" in capsys.readouterr().err


def test_unknown_key_exit_2(tmp_path, capsys):
    assert main(["bler-sweep", "--set", "trails=3", "--out", str(tmp_path / "r.csv")]) == 2
    assert "trails" in capsys.readouterr().err


def test_missing_config_file(tmp_path):
    assert main(["bler-sweep", "--config", str(tmp_path / "nope.json"),
                 "--out", str(tmp_path / "r.csv")]) == 2


def test_runtime_failure_exit_1(tmp_path, capsys):
    out = tmp_path / "no" / "dir" / "r.csv"
    assert main(["bler-sweep", "--sinr=0", "--trials", "1", "--out", str(out)]) == 1
    assert str(out.parent) in capsys.readouterr().err


def test_console_script_runs():
    res = subprocess.run([sys.executable, "-m", "jamllr", "--version"], capture_output=True,
                         text=True)
    assert res.returncode == 0 and "jamllr" in res.stdout
