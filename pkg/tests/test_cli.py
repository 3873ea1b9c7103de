import json
import subprocess
import sys
from pathlib import Path

import pytest

from lrb import __version__
from lrb.cli import fig2_rows, fig3_rows, fmt, main
from lrb.config import load_experiment_config
from lrb.fitting import fit_decay
from lrb.rb import SurvivalDataset, simulate_lrb

GOLDEN = Path(__file__).parent / "golden"
SMALL = GOLDEN / "small_config.json"


def run(*argv):
    return main([str(a) for a in argv])


def test_simulate_matches_golden(tmp_path):
    assert run("simulate", "--config", SMALL, "--out", tmp_path) == 0
    assert (tmp_path / "dataset.csv").read_text() == (GOLDEN / "small_dataset.csv").read_text()
    echo = json.loads((tmp_path / "config.json").read_text())
    assert echo["version"] == __version__ and echo["master_seed"] == 424242
    oracle = json.loads((tmp_path / "oracle.json").read_text())
    assert set(oracle) == {"F_rec", "F_norec", "pr_no", "pr_co", "pr_un", "p_L", "version"}


def test_simulate_is_byte_identical(tmp_path):
    for name, threads in (("a", 1), ("b", 1), ("c", 3)):
        assert run("simulate", "--config", SMALL, "--out", tmp_path / name, "--threads", threads) == 0
    for f in ("dataset.csv", "fit.json", "config.json", "oracle.json"):
        a = (tmp_path / "a" / f).read_bytes()
        assert a == (tmp_path / "b" / f).read_bytes() == (tmp_path / "c" / f).read_bytes()


def test_seed_override_changes_data(tmp_path):
    assert run("simulate", "--config", SMALL, "--out", tmp_path / "a", "--seed", 7) == 0
    assert (tmp_path / "a" / "dataset.csv").read_text() != (GOLDEN / "small_dataset.csv").read_text()
    assert json.loads((tmp_path / "a" / "config.json").read_text())["master_seed"] == 7


def test_fit_matches_in_process(tmp_path, capsys):
    assert run("simulate", "--config", SMALL, "--out", tmp_path) == 0
    capsys.readouterr()
    assert run("fit", tmp_path / "dataset.csv", "--bootstrap", 50) == 0
    printed = json.loads(capsys.readouterr().out)
    assert printed == json.loads((tmp_path / "fit.json").read_text())
    exp = load_experiment_config(SMALL)
    direct = fit_decay(simulate_lrb(exp.rb, 1), n_bootstrap=50).to_dict()
    assert {k: v for k, v in printed.items() if k != "version"} == json.loads(json.dumps(direct))


def test_oracle_command(capsys):
    spec = json.dumps({"type": "bitflip_independent", "p": 0.1, "n": 3})
    assert run("oracle", "--channel", spec) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["F_rec"] == pytest.approx(0.9813333333333333, abs=1e-12)
    assert out["p_L"] == pytest.approx(0.9626666666666667, abs=1e-12)
    assert out["pr_co"] == pytest.approx(0.162, abs=1e-12)
    assert run("oracle", "--channel", spec, "--recovery", "trivial") == 0
    assert json.loads(capsys.readouterr().out)["p_L"] == pytest.approx(0.6386666666666667, abs=1e-12)
    assert run("oracle", "--config", SMALL) == 0


def test_figures(tmp_path):
    assert run("figures", "fig2", "--out", tmp_path) == 0
    text = (tmp_path / "fig2.csv").read_text()
    golden = (GOLDEN / "fig2_head.csv").read_text()
    assert text.startswith(golden)
    assert json.loads((tmp_path / "fig2.json").read_text())["version"] == __version__
    rows = fig2_rows()
    best = max(rows, key=lambda r: r[2])
    assert best[0] == 1 / 3
    assert len(rows) == 102 and rows[-1][0] == 0.5
    assert run("figures", "fig3", "--out", tmp_path) == 0
    lines = (tmp_path / "fig3.csv").read_text().splitlines()
    assert lines[0] == "p,q,delta_f"
    assert all(float(line.split(",")[2]) > 0 for line in lines[1:])
    assert len(fig3_rows()) == 2 * 61


def test_float_format_is_round_trip():
    for v in (0.1, 1 / 3, 2.5e-17, 0.9626666666666667):
        assert float(fmt(v)) == v
        assert fmt(v) == repr(v)
    assert fmt(3) == "3"


def test_sweep(tmp_path):
    assert run("sweep", "--config", SMALL, "--param", "noise.channels.0.p", "--values", "0.01,0.1",
               "--out", tmp_path) == 0
    assert len((tmp_path / "sweep.csv").read_text().splitlines()) == 3
    assert run("sweep", "--config", SMALL, "--param", "noise.channels.5.p", "--values", "0.1",
               "--out", tmp_path) == 2
    cfg = tmp_path / "cfg.json"
    d = json.loads(SMALL.read_text())
    d["noise"] = {"type": "bitflip_independent", "p": 0.1, "n": 3}
    cfg.write_text(json.dumps(d))
    assert run("sweep", "--config", cfg, "--param", "noise.p", "--values", "0.01,0.1", "--out", tmp_path) == 0
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    assert lines[0] == "value,F_rec,F_norec,pr_no,pr_co,pr_un,p_L"
    assert len(lines) == 3
    assert run("sweep", "--config", cfg, "--param", "noise.p", "--values", "0.1,0.2", "--mode", "simulate",
               "--out", tmp_path / "s") == 0
    lines = (tmp_path / "s" / "sweep.csv").read_text().splitlines()
    assert lines[0] == "value,m,sequence_index,survivals,shots" and len(lines) == 1 + 2 * 12
    assert run("sweep", "--config", cfg, "--param", "noise.p", "--values", "abc", "--out", tmp_path) == 2
    assert run("sweep", "--config", cfg, "--param", "noise.lam", "--values", "0.1", "--out", tmp_path) == 2


def test_validation_errors(tmp_path, capsys):
    d = json.loads(SMALL.read_text())
    bad = dict(d, sequence_lengths=[1, 2])
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(bad, indent=2))
    assert run("simulate", "--config", path, "--out", tmp_path) == 2
    err = capsys.readouterr().err
    line = next(i for i, t in enumerate(path.read_text().splitlines(), 1) if "sequence_lengths" in t)
    assert f"bad.json:{line}:" in err
    no_seed = {k: v for k, v in d.items() if k != "master_seed"}
    path.write_text(json.dumps(no_seed))
    assert run("simulate", "--config", path) == 2
    path.write_text("{\n  \"noise\": \n}")
    assert run("simulate", "--config", path) == 2
    assert "bad.json:3:" in capsys.readouterr().err
    assert run("simulate", "--config", tmp_path / "missing.json") == 2
    assert run("figures", "fig7") == 2
    assert run("fit", tmp_path / "nothing.csv") == 2
    few = tmp_path / "few.csv"
    few.write_text(SurvivalDataset(((1, 0, 3, 4), (2, 0, 2, 4))).to_csv())
    assert run("fit", few) == 2
    assert run("simulate", "--config", SMALL, "--threads", 0) == 2


def test_console_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "lrb.cli", "figures", "fig2", "--out", str(tmp_path)],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert (tmp_path / "fig2.csv").exists()
