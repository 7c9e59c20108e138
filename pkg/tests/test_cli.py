import json
import os
import subprocess
import sys

import pytest

from monospectrum.cli import EXIT_INCOMPLETE, EXIT_MISMATCH, EXIT_OK, EXIT_USAGE, main
from monospectrum.caps import ENV_VAR


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, json.loads(out) if out.strip() else None, err


def test_weight_example(capsys):
    code, out, _ = run_json(capsys, "weight", "x0*x1*x2 + x3*x4*x5 + x6*x7*x8", "--m", "9")
    assert code == EXIT_OK
    assert out["weight_formula"] == out["weight_eval"] == "148"
    assert out["sigma"] == "37/16" and out["match"] and out["seed"] == 0


def test_weight_out_of_range_variable(capsys):
    code, out, err = run(capsys, "weight", "x1*x2*x3+x4*x5*x6+x7*x8*x9", "--m", "9")
    assert code == EXIT_USAGE and out == "" and err.startswith("error:")
    code, out, _ = run_json(capsys, "weight", "x1*x2*x3+x4*x5*x6+x7*x8*x9", "--m", "10")
    assert code == EXIT_OK and out["weight_formula"] == "296"


def test_weight_zero_and_large_m(capsys):
    code, out, _ = run_json(capsys, "weight", "0", "--m", "3")
    assert code == EXIT_OK and out["weight_formula"] == "0"
    code, _, err = run(capsys, "weight", "x0*x1", "--m", "40")
    assert code == EXIT_USAGE and "refused" in err
    code, out, _ = run_json(capsys, "--no-verify", "weight", "x0*x1", "--m", "40")
    assert code == EXIT_OK and out["weight_formula"] == str(1 << 38) and "weight_eval" not in out


def test_common_flags_either_side(capsys):
    a = run_json(capsys, "--seed", "7", "weight", "x0 + x1", "--m", "3")[1]
    b = run_json(capsys, "weight", "x0 + x1", "--m", "3", "--seed", "7")[1]
    assert a == b and a["seed"] == 7


def test_dyadic(capsys):
    code, out, _ = run_json(capsys, "dyadic", "x0*x1*x2 + x3*x4*x5 + x6*x7*x8", "--m", "9")
    assert code == EXIT_OK and out["reconstructs"] and out["sigma"] == "37/16"
    code, text, _ = run(capsys, "dyadic", "x0*x1 + x2*x3", "--format", "csv")
    assert code == EXIT_OK and text.splitlines()[0] == "j,b_j,term"


def test_template(capsys, tmp_path):
    spec = {"kind": "disjoint_k_sum", "m": 9, "params": {"monomials": ["x0*x1*x2", "x3*x4*x5", "x6*x7*x8"]}}
    code, out, _ = run_json(capsys, "template", json.dumps(spec))
    assert code == EXIT_OK and out["predicted_weight"] == out["evaluated_weight"] == "148"
    flip = {"kind": "complementary_flip", "m": 5,
            "params": {"f": "x0*x1", "j": 4, "g": "x2", "require_j_in_f": False}}
    path = tmp_path / "flip.json"
    path.write_text(json.dumps(flip))
    code, out, _ = run_json(capsys, "template", str(path))
    assert code == EXIT_MISMATCH and out["predicted_weight"] == "16" and out["evaluated_weight"] == "12"
    code, _, err = run(capsys, "template", '{"kind": "nope", "m": 3}')
    assert code == EXIT_USAGE and "nope" in err


def test_code_commands(capsys):
    code, out, _ = run_json(capsys, "code", "validate", '{"rm": [2, 4]}')
    assert code == EXIT_OK and out["dimension"] == 11 and out["d_min"] == "4"
    code, out, _ = run_json(capsys, "code", "validate", '{"m": 3, "monomials": ["x2"]}')
    assert code == EXIT_MISMATCH and set(out["missing"]) == {"1", "x0", "x1"}
    code, out, _ = run_json(capsys, "code", "closure", "x1*x2", "--m", "3")
    assert code == EXIT_OK and out["dimension"] == 7
    code, out, _ = run_json(capsys, "code", "matrix", '{"rm": [1, 2]}', "--hex")
    assert code == EXIT_OK and out["rows"] == ["f", "a", "c"] and out["rank"] == 3
    code, _, _ = run(capsys, "code", "closure", "x1")
    assert code == EXIT_USAGE


def test_enumerate(capsys):
    code, out, _ = run_json(capsys, "enumerate", '{"rm": [2, 4]}')
    assert code == EXIT_OK and out["count"] == "140" and out["verified"]["ok"]
    code, out, _ = run_json(capsys, "enumerate", '{"rm": [2, 4]}', "--kind", "nested_degree_drop")
    assert code == EXIT_OK and out["count"] == "870" and out["verified"]["count_matches_exhaustive"]
    code, out, _ = run_json(capsys, "enumerate", '{"rm": [2, 4]}', "--kind", "disjoint_k_sum", "--k", "2")
    # per-tuple orbit sizes disagree with the explicit orbits when supports interleave
    assert code == EXIT_MISMATCH and out["count"] == "768"
    assert not out["verified"]["seed_sizes_match"] and out["verified"]["exhaustive_count"] == "448"
    assert out["notes"]["collision_corrected_count"] == "448"
    code, text, _ = run(capsys, "enumerate", '{"rm": [1, 3]}', "--format", "csv")
    assert text.splitlines() == ["weight,count", "4,14"]


def test_enumerate_caps(capsys):
    code, _, err = run(capsys, "enumerate", '{"rm": [2, 7]}')
    assert code == EXIT_USAGE and "refused" in err
    code, out, _ = run_json(capsys, "enumerate", '{"rm": [2, 7]}', "--no-verify")
    # minimum-weight count of RM(2,7): 4 * 127 * 63 / 3
    assert code == EXIT_OK and out["count"] == "10668"
    code, out, _ = run_json(capsys, "enumerate", '{"rm": [2, 7]}', "--kind", "nested_degree_drop", "--no-verify")
    assert code == EXIT_INCOMPLETE and out["incomplete"]


def test_spectrum(capsys):
    code, out, _ = run_json(capsys, "spectrum", '{"rm": [1, 3]}')
    assert code == EXIT_OK and out["distribution"] == {"0": "1", "4": "14", "8": "1"}
    code, _, err = run(capsys, "spectrum", '{"rm": [3, 5]}')
    assert code == EXIT_USAGE and "dimension" in err
    code, out, _ = run_json(capsys, "spectrum", '{"rm": [3, 5]}', "--cap-dim", "26")
    assert code == EXIT_OK and out["distribution"]["4"] == "1240"


def test_orbit(capsys):
    code, out, _ = run_json(capsys, "orbit", "x1*x3", "--m", "4")
    assert code == EXIT_OK and out["size"] == "32" and out["formula_exponent"] == 5
    code, out, _ = run_json(capsys, "orbit", "x0*x2 + x1*x3", "--m", "4", "--master")
    assert code == EXIT_OK and out["master"]["exponent"] == 7
    code, out, _ = run_json(capsys, "orbit", "x0*x1*x2 + x0*x3*x4", "--m", "5", "--master")
    assert code == EXIT_MISMATCH and out["master"]["head_stabilizer_exponent"] == 8
    code, out, _ = run_json(capsys, "orbit", "x0*x1", "--m", "4", "--head-fix", "x0")
    assert code == EXIT_OK and out["head_fix"] == "x0"
    code, _, err = run(capsys, "orbit", "x0", "--m", "7")
    assert code == EXIT_USAGE and "refused" in err


def test_selftest(capsys):
    code, out, _ = run_json(capsys, "selftest", "--seed", "3")
    assert code == EXIT_OK and out["seed"] == 3


def test_env_restored(capsys, monkeypatch):
    monkeypatch.delenv(ENV_VAR, raising=False)
    run(capsys, "--cap-m", "4", "orbit", "x0", "--m", "3")
    assert ENV_VAR not in os.environ


def test_bad_arguments():
    with pytest.raises(SystemExit) as info:
        main(["weight"])
    assert info.value.code == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "monospectrum", "weight", "x0*x1", "--m", "3"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["weight_formula"] == "2"
