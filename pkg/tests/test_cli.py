import json

import numpy as np
import pytest

from cayleynet.cli import EXIT_CODES, main
from cayleynet.linalg import haar_unitary, save_matrix
from cayleynet.quantum import benchmark_circuit, load_circuit


def test_gen_circuit_stdout_is_loadable(tmp_path, capsys):
    assert main(["gen-circuit", "benchmark5"]) == 0
    (tmp_path / "c.json").write_text(capsys.readouterr().out)
    assert load_circuit(tmp_path / "c.json") == benchmark_circuit()


def test_gen_circuit_to_dir(tmp_path, capsys):
    assert main(["gen-circuit", "bell", "--output-dir", str(tmp_path), "--quiet"]) == 0
    assert (tmp_path / "bell.json").exists()


def test_gen_circuit_unknown(capsys):
    assert main(["gen-circuit", "nope"]) == EXIT_CODES["usage"]
    err = capsys.readouterr().err.strip()
    assert err.startswith("error: usage: ") and "\n" not in err


def test_run_builtin_with_overrides(tmp_path, capsys):
    cfg = {"target": {"kind": "haar", "n_qubits": 1, "seed": 1}, "n_pairs": 3,
           "train": {"epochs": 30}}
    path = tmp_path / "exp.json"
    path.write_text(json.dumps(cfg))
    out = tmp_path / "out"
    assert main(["run", str(path), "--output-dir", str(out), "--seed", "9"]) == 0
    assert "fidelity=" in capsys.readouterr().out
    echo = json.loads((out / "config.json").read_text())
    assert echo["train"]["seed"] == 9
    assert main(["run", str(path), "--output-dir", str(out), "--quiet"]) == 0
    assert capsys.readouterr().out == ""


def test_compare_prints_table(tmp_path, capsys):
    cfg = {"target": {"kind": "haar", "n_qubits": 1, "seed": 1}, "train": {"epochs": 20}}
    path = tmp_path / "exp.json"
    path.write_text(json.dumps(cfg))
    assert main(["compare", str(path), "--output-dir", str(tmp_path / "cmp")]) == 0
    out = capsys.readouterr().out
    assert "gram_schmidt" in out and "loss_incr" in out


def test_verify(tmp_path, capsys):
    u = haar_unitary(4, 0)
    save_matrix(tmp_path / "u.json", u)
    save_matrix(tmp_path / "v.json", 1j * u)
    assert main(["verify", str(tmp_path / "u.json")]) == 0
    assert json.loads(capsys.readouterr().out)["unitary_error"] <= 1e-12
    assert main(["verify", str(tmp_path / "v.json"), str(tmp_path / "u.json")]) == 0
    res = json.loads(capsys.readouterr().out)
    assert abs(res["fidelity"] - 1) < 1e-12


def test_verify_non_square(tmp_path, capsys):
    save_matrix(tmp_path / "m.json", np.ones((2, 3)))
    assert main(["verify", str(tmp_path / "m.json")]) == EXIT_CODES["numerical"]
    assert capsys.readouterr().err.startswith("error: numerical: ")


@pytest.mark.parametrize(
    "argv,category",
    [(["run", "no-such-config"], "config"), (["verify", "/no/such/file.json"], "io")],
)
def test_error_categories(argv, category, capsys):
    assert main(argv) == EXIT_CODES[category]
    err = capsys.readouterr().err
    assert err.startswith(f"error: {category}: ")
    assert err.count("\n") == 1


def test_bad_circuit_in_config(tmp_path, capsys):
    cfg = {"target": {"kind": "circuit", "spec": {"n_qubits": 1, "gates": [{"gate": "CNOT", "targets": [0, 1]}]}}}
    path = tmp_path / "exp.json"
    path.write_text(json.dumps(cfg))
    assert main(["run", str(path)]) == EXIT_CODES["config"]
