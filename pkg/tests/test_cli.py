import json
import subprocess
import sys

import pytest

from genrep_fq.cli import main
from genrep_fq.genrep import make_builtin
from genrep_fq.scalars import QQ


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_idempotent_text(capsys):
    code, out, _ = run(capsys, "idempotent", "--q", "2", "--n", "2")
    assert code == 0
    assert "1/2 * sum over orbit of 2:2x2:0001 (size 6)" in out


def test_idempotent_json(capsys):
    code, out, _ = run(capsys, "idempotent", "--q", "2", "--n", "2", "--json")
    data = json.loads(out)
    assert code == 0 and data["schema"] == 1 and data["status"] == "pass"
    assert "timing" not in out


def test_hypothesis_failure_exit_code(capsys):
    code, out, _ = run(capsys, "idempotent", "--q", "2", "--n", "2", "--coeff", "gf:2", "--json")
    assert code == 2
    data = json.loads(out)
    assert data["status"] == "hypothesis_failure"
    assert data["payload"]["certificate"]


def test_verify_morita_text(capsys):
    code, out, _ = run(capsys, "verify", "morita", "--q", "2", "--n", "2")
    assert code == 0 and "16 = 1+9+6" in out


def test_verify_rook_text(capsys):
    code, out, _ = run(capsys, "verify", "rook", "--n", "3")
    assert code == 0 and "34 = 1+9+18+6" in out


def test_verify_kovacs_describing_characteristic(capsys):
    code, _, _ = run(capsys, "verify", "kovacs", "--q", "2", "--n", "2", "--coeff", "gf:2")
    assert code == 2


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as info:
        main(["idempotent", "--q", "6"])
    assert info.value.code == 3
    with pytest.raises(SystemExit) as info:
        main(["idempotent", "--coeff", "gf:4"])
    assert info.value.code == 3
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 3


def test_budget_exit_code(capsys):
    code, _, err = run(capsys, "genrep", "--functor", "proj:3", "--q", "9", "--N", "3")
    assert code == 3 and "error" in err


def test_verification_failure_exit_code(capsys, tmp_path):
    data = make_builtin("const", 2, QQ, 1).to_json()
    key = next(k for k in data["maps"] if k.startswith("2:1x1:0"))
    data["maps"][key] = [["2/1"]]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    code, _, err = run(capsys, "genrep", "--load", str(path))
    assert code == 1 and "verification failed" in err


def test_genrep_save_load(capsys, tmp_path):
    path = tmp_path / "gr.json"
    code, out1, _ = run(capsys, "genrep", "--functor", "gr", "--N", "2", "--save", str(path),
                        "--json")
    assert code == 0 and path.exists()
    code, out2, _ = run(capsys, "genrep", "--load", str(path), "--json")
    assert code == 0
    assert json.loads(out1)["payload"] == json.loads(out2)["payload"]


def test_genrep_filtration_text(capsys):
    code, out, _ = run(capsys, "genrep", "--functor", "proj:2", "--action", "filtration",
                       "--N", "2")
    assert code == 0
    assert "k=1:     1     4    10" in out


def test_genrep_describing_characteristic(capsys):
    code, out, _ = run(capsys, "genrep", "--functor", "proj:1", "--action", "theta",
                       "--coeff", "gf:2", "--json")
    assert code == 2 and json.loads(out)["status"] == "hypothesis_failure"


@pytest.mark.parametrize("category,case,result", [("fin", "eps", "NoSplit"),
                                                  ("epi", "incl12", "NoSplit"),
                                                  ("fin", "identity", "Split")])
def test_split(capsys, category, case, result):
    code, out, _ = run(capsys, "split", "--category", category, "--case", case, "--json")
    assert code == 0
    assert json.loads(out)["payload"]["split"]["result"] == result


def test_out_file(capsys, tmp_path):
    path = tmp_path / "r.json"
    code, out, _ = run(capsys, "idempotent", "--json", "--out", str(path))
    assert code == 0 and out == ""
    data = json.loads(path.read_text())
    assert data["command"] == "idempotent --json"


def test_deterministic_in_process(capsys):
    _, a, _ = run(capsys, "verify", "genrep", "--q", "2", "--N", "2", "--json")
    _, b, _ = run(capsys, "verify", "genrep", "--q", "2", "--N", "2", "--json")
    assert a == b


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "genrep_fq", "split", "--case", "identity"],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0 and "Split" in proc.stdout
