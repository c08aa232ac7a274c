import io
import json
import subprocess
import sys

import pytest

from tfpart import flags
from tfpart.cli import main

PETERSEN = "I?LRCecq?"


def run(args, stdin=""):
    out = io.StringIO()
    code = main(args, stdin=io.StringIO(stdin), stdout=out)
    return code, out.getvalue()


def rows(text):
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def test_version(capsys):
    assert main(["--version"]) == 0
    assert capsys.readouterr().out.strip() == f"tfpart 0.1.0 catalog-sha256 {flags.catalog_hash()}"


def test_gen_counts():
    code, text = run(["gen", "--n", "5", "--forbid", "3"])
    assert code == 0 and len(text.split()) == 14
    code, text = run(["gen", "--n", "5", "--forbid", "4"])
    assert code == 0 and len(text.split()) == 29


def test_gen_guard_exit_code():
    assert run(["gen", "--n", "11"])[0] == 2


def test_solve_lines():
    code, text = run(["solve"], "A_\nA?\n")
    assert code == 0
    assert [r["cost"] for r in rows(text)] == [0, 0]
    code, text = run(["solve", "--spec", "balanced:3"], PETERSEN + "\n")
    assert rows(text)[0]["classes"] == [[0, 1, 2, 3], [4, 5, 6], [7, 8, 9]]
    code, text = run(["solve", "--alpha", "1/2"], PETERSEN + "\n")
    assert (rows(text)[0]["m"], rows(text)[0]["cost"]) == (5, 2)


def test_heur_and_flags():
    code, text = run(["heur", "--method", "nbhd", "--vertex", "0"], PETERSEN + "\n")
    assert code == 0 and rows(text)[0]["cost"] == 4
    code, text = run(["flags", "--ineq", "cut1"], PETERSEN + "\n")
    assert rows(text)[0]["residual"] == "-2509/90000"
    code, text = run(["flags", "--labeled", "lu2", "--anchor", "0"], PETERSEN + "\n")
    assert rows(text)[0]["density"] == "1/3"
    code, text = run(["flags", "--density", "A_"], PETERSEN + "\n")
    assert rows(text)[0]["density"] == "1/3"


def test_check_exit_codes(tmp_path):
    code, text = run(["check", "--claims", "T1", "--n-range", "4..6"])
    assert code == 0
    summary = rows(text)[-1]["summary"]
    assert summary["records"] == len(rows(text)) - 1
    assert run(["check", "--claims", "T6", "--n-range", "4..4"])[0] == 3
    code, _ = run(["check", "--claims", "T1", "--stdin"], "CF\n")
    assert code == 0


def test_check_figures(tmp_path):
    code, _ = run(["check", "--claims", "T1,RAZ", "--n-range", "4..6", "--figures", str(tmp_path)])
    assert code == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == ["RAZ.png", "T1.png"]


def test_unknown_subcommand_exits_64():
    with pytest.raises(SystemExit) as exc:
        run(["bogus"])
    assert exc.value.code == 64


@pytest.mark.parametrize("args", [
    ["check", "--claims", "T99", "--n-range", "4..5"],
    ["solve", "--spec", "nonsense"],
    ["flags", "--ineq", "missing"],
])
def test_usage_errors_exit_64(args):
    assert run(args, "A_\n")[0] == 64


def test_bad_graph6_input():
    assert run(["solve"], "not graph6!\n")[0] == 64


def test_module_entry_point_pipes():
    proc = subprocess.run([sys.executable, "-m", "tfpart", "gen", "--n", "6"],
                          capture_output=True, text=True, check=True)
    assert len(proc.stdout.split()) == 38
