import json
import subprocess
import sys

import pytest

from ic_stbc.cli import main, parse_grid
from ic_stbc.simulator import CSV_HEADER, read_csv


def test_parse_grid():
    assert parse_grid("0:2:6") == [0.0, 2.0, 4.0, 6.0]
    assert parse_grid("1.5,3") == [1.5, 3.0]
    assert parse_grid("0:0.1:0.3") == [0.0, 0.1, 0.2, 0.3]


def test_simulate_writes_csv(tmp_path):
    out = tmp_path / "ber.csv"
    code = main(["simulate", "--M", "2", "--L", "2", "--snr", "0:5:10", "--trials", "200",
                 "--target-errors", "0", "--seed", "3", "--out", str(out), "--gnuplot", str(tmp_path / "g.dat")])
    assert code == 0
    recs = read_csv(out)
    assert [r.snr_db for r in recs] == [0.0, 5.0, 10.0]
    assert all(r.trials == 200 and r.seed == 3 for r in recs)
    assert (tmp_path / "g.dat").exists()


def test_config_file_and_flag_override(tmp_path, capsys):
    conf = tmp_path / "run.cfg"
    conf.write_text("# sweep\nM=2\nL=2\nsnr=0:4:8\ntrials=128\ntarget-errors=0\nreceiver=ao\nseed=9\n")
    assert main(["simulate", "--config", str(conf)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == ",".join(CSV_HEADER) and len(lines) == 4
    assert lines[1].split(",")[1] == "ao" and lines[1].endswith(",9")
    assert main(["simulate", "--config", str(conf), "--receiver", "zf", "--snr", "3"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 2 and lines[1].startswith("3.0,zf,")


def test_config_accepts_code_spec_keys(tmp_path, capsys):
    conf = tmp_path / "spec.cfg"
    conf.write_text("M=1\nL=2\nconstellation_order=16\ncode=proposed\nsnr_db_grid=5\ntrials_per_point=64\n"
                    "target_bit_errors=0\nmaster_seed=4\n")
    assert main(["simulate", "--config", str(conf)]) == 0
    assert capsys.readouterr().out.splitlines()[1] == expected_row()


def expected_row():
    from ic_stbc.simulator import SimConfig, format_csv, run_sweep
    recs = run_sweep(SimConfig(M=1, N=1, L=2, constellation_order=16, snr_db_grid=[5.0], trials_per_point=64,
                               target_bit_errors=None, master_seed=4))
    return format_csv(recs).splitlines()[1]


@pytest.mark.parametrize("text", ["bogus=1\n", "M=two\n", "receiver=mf\n", "snr=5:0:1\n", "no equals sign\n"])
def test_bad_config_exits_1(tmp_path, text):
    conf = tmp_path / "bad.cfg"
    conf.write_text(text)
    assert main(["simulate", "--config", str(conf)]) == 1


def test_exit_codes(tmp_path):
    assert main(["simulate", "--snr", "10,5"]) == 1
    assert main(["simulate", "--receiver", "mf"]) == 1
    assert main(["simulate", "--L", "4", "--mod", "64", "--snr", "1"]) == 2
    assert main(["verify-rank", "--L", "4", "--mod", "64", "--draws", "1"]) == 2
    assert main(["simulate", "--snr", "1", "--trials", "10", "--out", str(tmp_path / "no" / "x.csv")]) == 3
    assert main(["simulate", "--config", str(tmp_path / "missing.cfg")]) == 3
    assert main(["pep-bound", "--alpha", "0", "--mu", "1", "--MN", "2"]) == 1


def test_verify_rank_report(tmp_path, capsys):
    rep = tmp_path / "rank.json"
    assert main(["verify-rank", "--M", "2", "--L", "2", "--draws", "3", "--report", str(rep)]) == 0
    assert capsys.readouterr().out.startswith("PASS")
    doc = json.loads(rep.read_text())
    assert doc["passed"] and doc["samples"] == 3
    assert doc["alpha_estimate"]["alpha"] == doc["min_lambda_min"] > 0
    assert main(["verify-rank", "--M", "2", "--L", "2", "--code", "multilayer", "--draws", "5",
                 "--stop-on-witness", "--report", str(rep)]) == 0
    assert capsys.readouterr().out.startswith("FAIL")
    assert json.loads(rep.read_text())["samples"] == 1


def test_pep_bound_table(capsys):
    assert main(["pep-bound", "--alpha", "1", "--mu", "1", "--MN", "2", "--snr", "0,30"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "snr_db,rho,bound,asymptote"
    assert float(lines[1].split(",")[2]) == pytest.approx(0.5 * (2 / 3) ** 2)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ic_stbc", "pep-bound", "--alpha", "1", "--mu", "1", "--MN", "1",
                           "--snr", "0"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "0.0,1.0," in proc.stdout
