import json
import subprocess
import sys

import numpy as np

from distillery.cli import main
from distillery.weyl import bell_diagonal_state, bell_pos


def test_example_exits_zero(capsys):
    assert main(["example"]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["s_max"] == 1


def test_unknown_flag_is_usage_error(capsys):
    assert main(["share", "--bogus"]) == 1
    assert "usage" in capsys.readouterr().err
    assert main([]) == 1
    assert main(["share", "--family", "bds", "--d", "2", "--protocols", "hashing"]) == 1
    assert main(["share", "--family", "bds", "--d", "4"]) == 1


def test_strict_qubit_share_exits_two(tmp_path):
    out = tmp_path / "r.json"
    code = main(["share", "--family", "bds", "--d", "2", "--restriction", "strict",
                 "--n", "10", "--max-attempts", "500", "--out", str(out)])
    assert code == 2
    assert json.loads(out.read_text())["complete"] is False


def test_share_reports_are_byte_identical(tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        args = ["share", "--family", "gbds", "--d", "3", "--n", "20", "--seed", "5",
                "--protocols", "fimax,adgj", "--gbds-bases", "2", "--gbds-per-basis", "10",
                "--format", "csv", "--out", str(p)]
        assert main(args) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_distill_command(tmp_path, capsys):
    p = np.full(9, 1 / 18)
    p[bell_pos(2, 1, 3)] = 5 / 9
    state = tmp_path / "state.json"
    state.write_text(bell_diagonal_state(3, p).to_json())
    assert main(["distill", "--state", str(state), "--protocol", "fimax", "--max-iters", "3"]) == 0
    out = capsys.readouterr().out
    assert "iter 1: fidelity 0.62962" in out
    assert out.strip().splitlines()[-1].startswith("distillable")


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "distillery", "example"], capture_output=True)
    assert res.returncode == 0
