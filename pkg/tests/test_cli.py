import json

import numpy as np
import pytest

from gxcalc.catalog import catalog_dir
from gxcalc.cli import EXIT_FAIL, EXIT_OK, EXIT_PARSE, EXIT_USAGE, main
from gxcalc.numerics import matrix_from_lists


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_catalog_lists_entries(capsys):
    code, doc = _run(capsys, "catalog")
    assert code == EXIT_OK
    names = [row["name"] for row in doc["catalog"]]
    assert "ising1" in names and "bilayer_ising_z2x_partial" in names


def test_validate_shipped_file(capsys):
    code, doc = _run(capsys, "validate", str(catalog_dir() / "ising1.cat"))
    assert code == EXIT_OK
    assert doc["pass"] is True
    assert doc["pentagon"]["max_residual"] < 1e-10


def test_validate_corrupted_f_token(tmp_path, capsys):
    text = (catalog_dir() / "ising1.cat").read_text()
    bad = text.replace(
        "sigma sigma sigma sigma 1 1 = 1/sqrt(2)",
        "sigma sigma sigma sigma 1 1 = -1*1/sqrt(2)",
    )
    assert bad != text
    path = tmp_path / "bad.cat"
    path.write_text(bad)
    code, doc = _run(capsys, "validate", str(path))
    assert code == EXIT_FAIL
    assert doc["pentagon"]["max_residual"] > 0.1


def test_validate_malformed_header(tmp_path, capsys):
    path = tmp_path / "broken.cat"
    path.write_text("[category]\nname = x\n[objects\n1 0 1\n")
    code, doc = _run(capsys, "validate", str(path))
    assert code == EXIT_PARSE
    assert doc["line"] == 3


def test_check_all_entries(capsys):
    for name in ("ising1", "z3", "toric_code", "ty_z3"):
        code, doc = _run(capsys, "check", "--cat", name)
        assert code == EXIT_OK and doc["pass"] is True


def test_check_partial_fails_cleanly(capsys):
    code, doc = _run(capsys, "check", "--cat", "bilayer_ising_z2x_partial")
    assert code == EXIT_FAIL
    assert doc["error"] == "MissingSymbol"


def test_rep_prints_defect_qubit(capsys):
    code, doc = _run(
        capsys, "rep", "--cat", "tc_z2x_restricted", "--object", "sigma+",
        "--strands", "4", "--total", "1",
    )
    assert code == EXIT_OK
    gens = [matrix_from_lists(g) for g in doc["generators"]]
    pref = np.exp(-1j * np.pi / 8)
    assert np.max(np.abs(gens[0] - pref * np.diag([1, 1j]))) < 1e-9
    assert np.max(np.abs(gens[2] - gens[0])) < 1e-12
    assert len({np.round(np.abs(g), 6).tobytes() for g in gens}) == 2  # two distinct generators


def test_closure_order(capsys):
    code, doc = _run(
        capsys, "closure", "--cat", "tc_z2x_restricted", "--object", "sigma+",
        "--strands", "4", "--total", "1", "--bound", "100000",
    )
    assert code == EXIT_OK and doc["order"] == 24


def test_eval_diagram_file(tmp_path, capsys):
    path = tmp_path / "loop.gxd"
    path.write_text("strands 0 :\ncup 1 sigma\ncap 1 sigma\n")
    code, doc = _run(capsys, "eval", str(path), "--cat", "ising1", "--root", "1")
    assert code == EXIT_OK
    assert doc["kind"] == "scalar"
    assert doc["scalar"].startswith("1.41421356")


def test_eval_parse_error(tmp_path, capsys):
    path = tmp_path / "bad.gxd"
    path.write_text("strands 1 : sigma\nbraid+\n")
    code, doc = _run(capsys, "eval", str(path), "--cat", "ising1")
    assert code == EXIT_PARSE and doc["line"] == 2


def test_tgate_output(capsys):
    code, doc = _run(capsys, "tgate", "--method", "both")
    assert code == EXIT_OK
    assert doc["ratio"] == "0.70710678+0.70710678i"
    assert doc["cross_method_deviation"] < 1e-9
    assert doc["cross_method_ok"] is True
    assert doc["protocol"]["leakage"] < 1e-9


def test_fit_r_ising(capsys):
    code, doc = _run(
        capsys, "--seed", "1", "fit-r", "--cat", "ising1",
        "--unknown", "sigma,sigma,1", "--unknown", "sigma,sigma,psi",
    )
    assert code == EXIT_OK
    assert doc["residual"] < 1e-6


def test_deterministic_output(capsys):
    main(["tgate", "--method", "both"])
    first = capsys.readouterr().out
    main(["tgate", "--method", "both"])
    second = capsys.readouterr().out
    assert first == second


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["rep", "--cat", "nonsense"])
    assert exc.value.code == EXIT_USAGE


def test_domain_error_exit_code(capsys):
    code, doc = _run(
        capsys, "rep", "--cat", "ising1", "--object", "sigma",
        "--strands", "4", "--total", "nonexistent",
    )
    assert code == EXIT_FAIL or doc.get("dimension") == 0
