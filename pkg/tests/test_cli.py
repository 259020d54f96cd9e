import json
import subprocess
import sys

import pytest

from multikoszul.cli import EXIT_CAP, EXIT_INPUT, EXIT_OK, EXIT_NOT_MK, main

from conftest import corpus_names, corpus_path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


def test_check_trunc3(capsys):
    code, d = run_json(capsys, "check", corpus_path("trunc3"), "--hdeg", 4, "--adeg", 8)
    assert code == EXIT_OK
    assert d["schema"] == 1
    assert d["command"] == "check"
    assert d["bounds"] == [4, 8]
    assert d["jdims"] == {"0": {"0": 1}, "1": {"1": 1}, "2": {"3": 1}, "3": {"4": 1}, "4": {"6": 1}}
    assert d["jdims"] == d["tor"]
    assert d["euler_ok"] is True
    assert [1, 0] in d["structural_zero"]


def test_expect_koszul_on_nonkoszul(capsys):
    code, d = run_json(capsys, "check", corpus_path("nonkoszul"), "--hdeg", 4, "--adeg", 6, "--expect-koszul")
    assert code == EXIT_NOT_MK
    assert d["witness"] == [3, 4]
    code, _ = run_json(capsys, "check", corpus_path("nonkoszul"), "--hdeg", 4, "--adeg", 6)
    assert code == EXIT_OK


def test_bad_input_exit_code(tmp_path, capsys):
    f = tmp_path / "bad.alg"
    f.write_text("gens x:1, y:2\nrel x*x - y*y*y\n")
    code, _, err = run(capsys, "check", f)
    assert code == EXIT_INPUT
    assert err.strip()
    code, _, _ = run(capsys, "check", tmp_path / "missing.alg")
    assert code == EXIT_INPUT


@pytest.mark.parametrize("argv", [["--hdeg", "0"], ["--adeg", "1"]])
def test_bad_bounds(capsys, argv):
    code, _, _ = run(capsys, "hilbert", corpus_path("trunc2"), *argv)
    assert code == EXIT_INPUT


def test_cap_exit_code(monkeypatch, capsys):
    monkeypatch.setenv("MK_MAX_WORDS", "50")
    code, _, err = run(capsys, "check", corpus_path("poly2"))
    assert code == EXIT_CAP
    assert "MK_MAX_WORDS" in err


def test_json_is_deterministic(capsys):
    a = run(capsys, "ainfty", corpus_path("trunc3"), "--hdeg", 4, "--adeg", 8, "--json")[1]
    b = run(capsys, "ainfty", corpus_path("trunc3"), "--hdeg", 4, "--adeg", 8, "--json")[1]
    assert a == b
    assert json.dumps(json.loads(a), sort_keys=True, indent=2) == a.strip()


def test_empty_tables_serialize_as_empty(capsys):
    code, d = run_json(capsys, "tor", corpus_path("free2"), "--hdeg", 3, "--adeg", 3)
    assert code == EXIT_OK
    assert d["tor"] == {"0": {"0": 1}, "1": {"1": 2}}
    _, d = run_json(capsys, "ainfty", corpus_path("poly2"), "--hdeg", 3, "--adeg", 6)
    assert d["coproducts"]["3"] == {} and d["coproducts"]["4"] == {}


def test_text_grid_marks_structural_zeros(capsys):
    code, out, _ = run(capsys, "check", corpus_path("trunc3"), "--hdeg", 3, "--adeg", 6, "--text")
    assert code == EXIT_OK
    assert "'.' marks structural zeros" in out
    row = [ln.split() for ln in out.splitlines() if ln.split()[:1] == ["3"]][0]
    assert row == ["3", ".", ".", ".", ".", "1", "0", "0"]


@pytest.mark.parametrize("name", ["trunc3", "poly2", "nonkoszul", "mixed23"])
def test_prime_field_agrees_with_rationals(capsys, name):
    args = ["jspaces", corpus_path(name), "--hdeg", 4, "--adeg", 7]
    _, q = run_json(capsys, *args)
    _, fp = run_json(capsys, *args, "--field", "F 32003")
    assert q["J"] == fp["J"]
    assert fp["presentation"]["field"] != q["presentation"]["field"]


def test_jspaces_debug_and_basis(capsys):
    _, d = run_json(capsys, "jspaces", corpus_path("trunc3"), "--hdeg", 3, "--adeg", 6, "--debug", "--basis")
    assert d["jtilde_equal"] is True
    assert d["agree"] is True
    assert "basis" in d


def test_oracle(capsys):
    code, d = run_json(capsys, "oracle", corpus_path("poly2"), "--oracle-bounds", "3,5")
    assert code == EXIT_OK
    assert d["agree"] is True
    assert d["bar_tor"] == d["tor"]


def test_yoneda_gate(capsys):
    code, _, err = run(capsys, "yoneda", corpus_path("nonkoszul"), "--hdeg", 3, "--adeg", 6)
    assert code == EXIT_INPUT
    code, out, err = run(capsys, "yoneda", corpus_path("nonkoszul"), "--hdeg", 3, "--adeg", 6, "--force", "--json")
    d = json.loads(out)
    assert code == EXIT_OK
    assert "formal tables" in err
    assert "formal tables, no theorem applies" in d["notes"]


def test_yoneda_and_ainfty_reports(capsys):
    _, y = run_json(capsys, "yoneda", corpus_path("trunc3"), "--hdeg", 5, "--adeg", 10)
    assert y["associative"] and y["unit"] and y["k2"]["ok"]
    _, a = run_json(capsys, "ainfty", corpus_path("trunc3"), "--hdeg", 5, "--adeg", 10)
    for key in ("stasheff", "stasheff_dual", "stasheff_reduced"):
        assert a[key]["ok"], key
    assert a["counit"] is True
    assert a["twisted"]["equal"] is True


def test_timing_only_on_request(capsys):
    _, d = run_json(capsys, "hilbert", corpus_path("trunc2"))
    assert "timing" not in d
    _, d = run_json(capsys, "hilbert", corpus_path("trunc2"), "--timing")
    assert "timing" in d


def test_corpus_command(capsys):
    code, d = run_json(capsys, "corpus", "--hdeg", 4, "--adeg", 8)
    assert code == EXIT_OK
    assert d["ok"] is True


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "multikoszul", "hilbert", corpus_path("trunc2"), "--adeg", "4",
                        "--json"], capture_output=True, text=True)
    assert r.returncode == 0
    assert json.loads(r.stdout)["command"] == "hilbert"
