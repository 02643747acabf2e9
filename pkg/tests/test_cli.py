import json
import subprocess
import sys

import pytest

import kl_descent.verify as verify
from kl_descent.cli import main


def run(tmp_path, *args, out="r"):
    argv = ["run", "--cache-dir", str(tmp_path / "cache"), "--out", str(tmp_path / out)]
    return main(argv + list(args))


def test_a3_swap_theorem_a_and_brauer(tmp_path, capsys):
    code = run(tmp_path, "--type", "A3", "--weights", "1,1,1", "--aut", "3,2,1", "--p", "2",
               "--tasks", "theorem_a,brauer")
    assert code == 0
    files = sorted(p.name for p in (tmp_path / "r").iterdir())
    assert files == ["brauer.json", "theorem_a.json"]
    ta = json.loads((tmp_path / "r" / "theorem_a.json").read_text())
    assert ta["status"] == "pass"
    checks = [r["check"] for r in json.loads((tmp_path / "r" / "brauer.json").read_text())]
    assert checks == ["prop_B", "kl_mod_p", "j_descent"]
    assert "theorem_a: pass" in capsys.readouterr().out


def test_inconsistent_weights_rejected(tmp_path, capsys):
    assert run(tmp_path, "--type", "A2", "--weights", "1,2") == 2
    err = capsys.readouterr().err
    assert "weights" in err and "m_12 = 3 is odd" in err


def test_size_gate(tmp_path, capsys):
    assert run(tmp_path, "--type", "E8") == 2
    assert "size gate" in capsys.readouterr().err
    # a matrix input is refused during enumeration
    assert run(tmp_path, "--matrix", "1,3,2,2,2;3,1,3,2,2;2,3,1,3,2;2,2,3,1,3;2,2,2,3,1") == 2


@pytest.mark.parametrize("args,field", [
    (["--type", "A2", "--tasks", "bogus"], "tasks"),
    (["--type", "A2", "--p", "4"], "p"),
    (["--type", "A2", "--tasks", "brauer", "--aut", "2,1"], "p"),
    (["--type", "A2", "--tasks", "theorem_a"], "aut"),
    (["--type", "A3", "--aut", "2,1,3", "--tasks", "theorem_a"], "aut"),
    (["--type", "D4", "--aut", "3,2,4,1", "--p", "2", "--tasks", "brauer"], "p"),
    (["--type", "Q7"], "type"),
    (["--matrix", "1,3;2,1"], "matrix"),
])
def test_config_errors_name_the_field(tmp_path, capsys, args, field):
    assert run(tmp_path, *args) == 2
    assert f"config error: {field}:" in capsys.readouterr().err


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text('type = "B2"\nweights = [1, 2]\ntasks = ["enumerate"]\nformat = "csv"\n')
    assert run(tmp_path, "--config", str(cfg)) == 0
    rows = (tmp_path / "r" / "elements.csv").read_text().splitlines()
    assert rows[0] == "w,index,length,phi" and rows[-1] == "s1s2s1s2,7,4,6"
    assert run(tmp_path, "--config", str(cfg), "--weights", "1,3", out="r2") == 0
    assert (tmp_path / "r2" / "elements.csv").read_text().splitlines()[-1] == "s1s2s1s2,7,4,8"
    js = tmp_path / "run.json"
    js.write_text(json.dumps({"matrix": [[1, 4], [4, 1]], "weights": [2, 1],
                              "tasks": "cells", "format": "dot"}))
    assert run(tmp_path, "--config", str(js), out="r3") == 0
    assert sorted(p.name for p in (tmp_path / "r3").iterdir()) == [
        "cells_L.dot", "cells_LR.dot", "cells_R.dot"]
    bad = tmp_path / "bad.json"
    bad.write_text('{"colour": 1}')
    assert run(tmp_path, "--config", str(bad)) == 2


def test_gamma_rank_two_weights(tmp_path):
    assert run(tmp_path, "--type", "B2", "--gamma-rank", "2", "--weights", "1:0,0:1",
               "--tasks", "cells,conjectures") == 0
    cells = json.loads((tmp_path / "r" / "cells.json").read_text())
    assert cells["instance"]["weights"] == [[1, 0], [0, 1]]
    assert cells["elements"][-1]["a"] == "(2,2)"
    assert len(cells["LR"]["cells"]) == 5


def test_csv_cells_and_kl(tmp_path):
    assert run(tmp_path, "--type", "A2", "--tasks", "kl,cells", "--format", "csv") == 0
    cells = (tmp_path / "r" / "cells.csv").read_text().splitlines()
    assert cells[0] == ("w,index,length,phi,a,Delta,n,duflo,left_cell,right_cell,"
                        "two_sided_cell")
    assert cells[-1] == "s1s2s1,5,3,3,3,3,1,True,3,3,2"
    kl = (tmp_path / "r" / "kl.csv").read_text().splitlines()
    assert "1,s1s2s1,e[-3]" in kl


def test_math_failure_exits_1(tmp_path, monkeypatch, capsys):
    real = verify.check_conjectures

    def broken(inst, which=verify.CONJECTURES, seed=0):
        rep = real(inst, which, seed)
        rep.checks[0].update(status="fail", witnesses=[{"z": "1"}], violations=1)
        return rep
    monkeypatch.setattr(verify, "check_conjectures", broken)
    assert run(tmp_path, "--type", "A1", "--tasks", "conjectures") == 1
    assert "conjectures: fail" in capsys.readouterr().out
    assert main(["report", str(tmp_path / "r" / "conjectures.json")]) == 1


def test_reports_are_byte_identical(tmp_path):
    args = ["--type", "B2", "--weights", "1,2", "--tasks",
            "enumerate,kl,cells,conjectures"]
    assert main(["run", "--no-cache", "--out", str(tmp_path / "a")] + args) == 0
    assert main(["run", "--cache-dir", str(tmp_path / "c"), "--out", str(tmp_path / "b")]
                + args) == 0
    assert main(["run", "--cache-dir", str(tmp_path / "c"), "--out", str(tmp_path / "c2")]
                + args) == 0
    for name in ("elements.json", "kl.json", "cells.json", "conjectures.json"):
        a = (tmp_path / "a" / name).read_bytes()
        assert a == (tmp_path / "b" / name).read_bytes() == (tmp_path / "c2" / name).read_bytes()


def test_cache_subcommands(tmp_path, capsys):
    cache = str(tmp_path / "cache")
    assert main(["cache", "list", "--cache-dir", cache]) == 0
    assert capsys.readouterr().out == ""
    assert run(tmp_path, "--type", "A3", "--tasks", "cells") == 0
    capsys.readouterr()
    assert main(["cache", "validate", "--cache-dir", cache]) == 0
    out = capsys.readouterr().out.splitlines()
    assert len(out) == 2 and all(line.endswith("\tok") for line in out)
    entry = sorted((tmp_path / "cache").glob("*.kl.json.gz"))[0]
    raw = bytearray(entry.read_bytes())
    raw[20] ^= 0x01
    entry.write_bytes(bytes(raw))
    assert main(["cache", "validate", "--cache-dir", cache]) == 1
    assert "quarantined" in capsys.readouterr().out
    assert main(["cache", "gc", "--cache-dir", cache]) == 0
    assert main(["cache", "list", "--cache-dir", cache]) == 0


def test_report_subcommand(tmp_path, capsys):
    assert run(tmp_path, "--type", "A2", "--aut", "2,1", "--p", "2",
               "--tasks", "conjectures,brauer,probe") == 0
    capsys.readouterr()
    files = sorted(str(p) for p in (tmp_path / "r").iterdir())
    assert main(["report"] + files) == 0
    out = capsys.readouterr().out
    assert "prop_B\tpass" in out and "P15\tpass" in out and "open_questions\texploratory" in out
    assert main(["report", str(tmp_path / "nope.json")]) == 2


def test_console_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "kl_descent.cli", "run", "--type", "A1",
                          "--no-cache", "--out", str(tmp_path / "o")],
                         capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert "conjectures: pass" in res.stdout
