import json
import subprocess
import sys

import numpy as np

from griddeg.cli import main
from griddeg.field_poly import EvalSet, PrimeField
from griddeg.grid import FunctionOracle, GridDomain
from griddeg.groups import AbelianGroup
from griddeg.tableio import load_function, save_function


def write(tmp_path, name, f):
    path = tmp_path / name
    save_function(f, path)
    return str(path)


def square(n=4):
    F7 = PrimeField(7)
    S = EvalSet.standard(F7, 3)
    D = GridDomain.symmetric(3, n)
    x1 = S.values(D.points_array()[:, 0])
    return FunctionOracle(D, F7, table=(x1 * (x1 - 1) % 7).reshape(D.sizes))


def test_tester_commands(tmp_path, capsys):
    path = write(tmp_path, "sq.txt", square())
    assert main(["deg-test", "--fn", path, "--d", "1", "--t", "6", "--trials", "20"]) == 0
    header, row = capsys.readouterr().out.split()
    assert header == "rate,ci_lo,ci_hi,mean_queries"
    rate, lo, hi, q = map(float, row.split(","))
    assert rate == 1.0 and lo <= rate <= hi and q > 0
    assert main(["weak-deg", "--fn", path, "--d", "2", "--t", "3", "--trials", "5"]) == 0
    assert capsys.readouterr().out.split()[1].startswith("0,")
    assert main(["junta-test", "--fn", path, "--d", "1", "--k", "3", "--trials", "5", "--form", "recursive"]) == 0


def test_distance_command(tmp_path, capsys):
    path = write(tmp_path, "sq.txt", square(2))
    witness = tmp_path / "w.txt"
    assert main(["distance", "--family", "degree", "--d", "1", "--fn", path, "--witness", str(witness)]) == 0
    assert capsys.readouterr().out.strip() == "1/3,0.333333"
    assert load_function(witness).domain.sizes == (3, 3)
    assert main(["distance", "--family", "junta", "--d", "1", "--fn", path]) == 0
    assert capsys.readouterr().out.startswith("0,")


def test_bad_inputs_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("sizes: 2\ncodomain: Z3\n0 | 1\n1 | 7\n")
    assert main(["junta-test", "--fn", str(bad), "--d", "1"]) == 2
    assert "line 4" in capsys.readouterr().err
    group_fn = FunctionOracle(GridDomain.symmetric(3, 2), AbelianGroup.cyclic(3), table=np.zeros((3, 3), dtype=int))
    assert main(["weak-deg", "--fn", write(tmp_path, "g.txt", group_fn), "--d", "1"]) == 2


def test_sse_and_impossibility(capsys):
    assert main(["sse", "--sets", "2"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "set,nu,delta,lhs,bound,ok" and len(lines) == 9
    assert main(["impossibility", "--n", "27", "--l", "1", "2", "--trials", "4"]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 9


def test_experiment_command(tmp_path):
    cfg = tmp_path / "c.json"
    out = tmp_path / "o.csv"
    cfg.write_text(json.dumps({"version": 1, "kind": "oracle-crosscheck", "seed": 1, "output": str(out),
                               "params": {"functions": 5}}))
    assert main(["experiment", "--config", str(cfg)]) == 0
    assert out.read_text().startswith("function,interpolation,definition")
    cfg.write_text('{"version": 1, "kind": "oracle-crosscheck", "seed": 1, "oops": 0}')
    assert main(["experiment", "--config", str(cfg)]) == 2


def test_acceptance_subset_and_module_entry():
    assert main(["acceptance", "--only", "6"]) == 0
    proc = subprocess.run([sys.executable, "-m", "griddeg", "acceptance", "--only", "6"], capture_output=True, text=True)
    assert proc.returncode == 0 and "[PASS] criterion  6" in proc.stdout
