import csv
import json
import subprocess
import sys

import pytest

from finitecomb import verify
from finitecomb.cli import build_config, main, parse_pairs
from finitecomb.errors import ConfigError

import oracles


def _read(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_sumprod_exhaustive_matches_oracle(tmp_path):
    out = tmp_path / "r"
    assert main(["sumprod", "q=13", "n=2..3", f"out={out}"]) == 0
    rows = _read(out / "sumprod.csv")
    assert [int(r["minMax"]) for r in rows] == [oracles.minmax(13, 2), oracles.minmax(13, 3)]
    man = json.loads((out / "manifest.json").read_text())
    assert man["rows"] == 2 and man["violations"] == 0
    assert "out" not in man["config"]
    assert not (out / "timing.json").exists()


def test_replay_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    args = ["distance", "q=7", "N=4", "mode=randomized", "trials=50", "seed=3", "format=json"]
    assert main(args + [f"out={a}"]) == 0
    assert main(args + [f"out={b}"]) == 0
    for name in ("distance.csv", "distance.json", "manifest.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_flags_override_config_file(tmp_path):
    ini = tmp_path / "run.ini"
    ini.write_text("[experiment]\nq = 7\nseed = 1\n\n[incidence]\nN = 5\ntrials = 2\n")
    out = tmp_path / "o"
    assert main(["incidence", "--config", str(ini), "trials=3", "--seed", "9", f"out={out}"]) == 0
    rows = _read(out / "incidence.csv")
    assert rows[0]["trials"] == "3" and rows[0]["seed"] == "9" and rows[0]["N"] == "5"


def test_timing_is_opt_in(tmp_path):
    out = tmp_path / "t"
    assert main(["kakeya", "q=3", "seed=0", "trials=1", f"out={out}", "--timing"]) == 0
    assert (out / "timing.json").exists()
    assert (out / "kakeya_assignment_q3.txt").exists()


@pytest.mark.parametrize("argv", [
    ["sumprod", "q=", "n=2"],
    ["sumprod", "q=12", "n=2"],
    ["sumprod", "q=7", "n=9"],
    ["sumprod", "q=7"],
    ["incidence", "q=7", "N=3"],
    ["distance", "q=5", "N=3"],
    ["kakeya", "q=17", "seed=0"],
    ["verify-all", "q=2"],
    ["sumprod", "q=7", "n=2", "colour=blue"],
    ["sumprod", "q=7", "n=2", "oops"],
    ["no-such-kind"],
    ["plot"],
])
def test_config_errors_exit_2(argv, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main(argv) == 2


def test_violation_exits_1(tmp_path, monkeypatch):
    bad = verify.SuiteResult("forced", 3, 1, 1, 0, "x")
    monkeypatch.setattr(verify, "verify_all", lambda q, seed: [bad])
    assert main(["verify-all", "q=3", f"out={tmp_path}"]) == 1
    assert json.loads((tmp_path / "manifest.json").read_text())["violations"] == 1


def test_plot_scripts(tmp_path):
    out = tmp_path / "r"
    assert main(["sumprod", "q=7", "n=2..4", f"out={out}"]) == 0
    assert main(["plot", f"dir={out}"]) == 0
    script = out / "plot_sumprod.py"
    assert script.exists()
    compile(script.read_text(), str(script), "exec")


def test_parse_helpers():
    assert parse_pairs(["a=1", "b = x=y"]) == {"a": "1", "b": "x=y"}
    cfg = build_config("sumprod", {"q": "13,7", "n": "2..4"})
    assert cfg.q == (7, 13) and cfg.sizes == (2, 3, 4)
    assert build_config("sumprod", {"q": "5..13", "n": "2"}).q == (5, 7, 11, 13)
    assert cfg.digest() == build_config("sumprod", {"q": "7,13", "n": "4,3,2"}).digest()
    with pytest.raises(ConfigError):
        build_config("sumprod", {"q": "7", "n": "2", "mode": "randomized"})


def test_console_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "finitecomb", "sumprod", "q=7", "n=2",
                        f"out={tmp_path}"], capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
    r = subprocess.run([sys.executable, "-m", "finitecomb", "sumprod", "q=8", "n=2"],
                       capture_output=True, text=True)
    assert r.returncode == 2 and "not prime" in r.stderr
