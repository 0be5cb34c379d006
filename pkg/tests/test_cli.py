import json
from pathlib import Path

from selfsim.cli import main

LAT = Path(__file__).resolve().parent.parent / "lattices"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr().out


def test_invariants(capsys, tmp_path):
    code, out = run(capsys, "invariants", LAT / "family_l1_p3.yaml", "--json", tmp_path / "i.json")
    assert code == 0
    assert "s-invariants = (2, 4, 6)" in out and "K = 1" in out and "= 3" in out
    assert json.loads((tmp_path / "i.json").read_text())["bound"] == 3
    code, out = run(capsys, "invariants", LAT / "units.yaml")
    assert code == 0 and "K = 0" in out
    assert run(capsys, "invariants", LAT / "solvable.yaml")[0] == 3
    code, out = run(capsys, "invariants", LAT / "tensor_l1_p3.yaml")
    assert "s-invariants = (2, 4, 6)" in out


def test_verify_and_reverify(capsys, tmp_path):
    cert = tmp_path / "c.json"
    code, out = run(capsys, "verify", LAT / "family_l2_p3.yaml", "--k", 1, "--json", cert)
    assert code == 0
    assert "13 subalgebras" in out and "NotSelfSimilarOfIndex" in out
    assert json.loads(cert.read_text())["schema"] == "selfsim.certificate/1"
    code, out = run(capsys, "reverify", cert)
    assert code == 0 and "byte-for-byte" in out


def test_verify_hypothesis_violated(capsys, tmp_path):
    code, _ = run(capsys, "verify", LAT / "family_l1_p3.yaml", "--k", 1, "--json", tmp_path / "c.json")
    assert code == 4


def test_family(capsys):
    code, out = run(capsys, "family", "--l", 0, "--p", 3)
    assert code == 0 and "(9, 9, -9)" in out


def test_enumerate(capsys):
    code, out = run(capsys, "enumerate", LAT / "family_l2_p3.yaml", "--k", 1)
    assert code == 0 and "count = 13" in out


def test_core(capsys, tmp_path):
    code, out = run(capsys, "core", LAT / "family_l1_p3.yaml", "--json", tmp_path / "core.json")
    assert code == 0 and "NotSimple" in out
    d = json.loads((tmp_path / "core.json").read_text())
    assert d["core_k_vector"] == [0, 0, 0]
    code, out = run(capsys, "core", LAT / "family_l1_p3.yaml", "--domain", "0,0,1,0,0,0", "--map", "zero")
    assert code == 0 and "NotSimple" in out


def test_ldiag(capsys):
    code, out = run(capsys, "ldiag", "--trials", 20, "--seed", 2, "--p", 3, 5)
    assert code == 0 and "passes=20" in out


def test_parse_error(capsys, tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("prime: 4\nbasis_form: diagonal\na0: 1\na1: 1\na2: 1\n")
    assert main(["invariants", str(bad)]) == 2
