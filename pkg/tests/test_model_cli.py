import json
import os
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from courant_kit.cli import execute, main, report_body, thread_count, UsageError
from courant_kit.model import ModelError, build_model, load_model, parse_json

DATA = Path(__file__).parent / "data"


def run(*argv):
    return execute([str(a) for a in argv])


def write(tmp_path, obj, name="m.json"):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return p


# ---------------------------------------------------------------------------
# model loading


def test_chart_only_model():
    m = build_model({"chart": ["x", "y"]})
    assert m.chart.names == ("x", "y")
    assert m.double.rank == 2 and m.pi.is_zero()


def test_float_literal_rejected():
    with pytest.raises(ModelError, match="float"):
        parse_json('{"chart": ["x"], "poisson": [], "options": {"degree_cap": 1.5}}')


def test_duplicate_key_rejected():
    with pytest.raises(ModelError, match="duplicate"):
        parse_json('{"chart": ["x"], "dirac": {"L": {"factor": "A"}, "L": {"factor": "A*"}}}')


def test_parse_error_has_position():
    with pytest.raises(ModelError) as exc:
        parse_json('{\n  "chart": ["x",]\n}')
    assert "line 2" in str(exc.value) and "column" in str(exc.value)


def test_schema_error_names_block():
    with pytest.raises(ModelError) as exc:
        build_model({"chart": ["x"], "dirac": {"L": {"frame": [{"a": [1], "b": [0]}]}}})
    assert "dirac/L" in str(exc.value)


def test_non_poisson_model_rejected():
    with pytest.raises(ModelError) as exc:
        load_model(DATA / "bad_poisson.json")
    assert exc.value.block == "poisson"
    assert "[pi,pi] = -2 d/dx2^d/dx3^d/dx4" in str(exc.value)


def test_polynomial_encodings_agree():
    terms = [{"exponents": [1, 1], "numerator": 3, "denominator": 2}]
    a = build_model({"chart": ["x", "y"], "poisson": [{"index": ["x", "y"], "coeff": terms}]})
    b = build_model({"chart": ["x", "y"], "poisson": [{"index": ["x", "y"], "coeff": "3/2 x y"}]})
    assert a.pi == b.pi


def test_custom_bialgebroid_block():
    m = build_model({
        "chart": ["x"],
        "bialgebroid": {"A": {"anchor": [[1]], "names": ["X"]}, "Astar": {"anchor": [[0]]}},
        "dirac": {"A": {"factor": "A"}},
    })
    assert m.bialgebroid.A.names == ("X",)
    assert m.pi is None


def test_bad_bialgebroid_rejected():
    with pytest.raises(ModelError) as exc:
        build_model({"chart": ["x"], "bialgebroid": {
            "A": {"anchor": [[1], ["x"]]},
            "Astar": {"anchor": [[0], [0]]}}})
    assert exc.value.block.startswith("bialgebroid")


def test_block_without_chart_rejected():
    with pytest.raises(ModelError):
        build_model({"poisson": []})


# ---------------------------------------------------------------------------
# commands and exit codes


def test_verify_axioms_exit_zero():
    code, text = run("verify-axioms", "--model", DATA / "poisson_x1.json")
    assert code == 0
    lines = text.splitlines()
    assert lines[0] == "courant-kit 0.1.0"
    assert lines[1] == "command: verify-axioms --model poisson_x1.json"
    assert lines[2] == "---"
    assert lines[-1] == "RESULT: PASS"
    for k in ("i", "ii", "iii", "iv", "v"):
        assert any(l.startswith(f"AXIOM({k}) ") for l in lines)


def test_check_dirac_non_poisson_graph_exit_one():
    code, text = run("check-dirac", "graphPi1", "--model", DATA / "graphs.json")
    assert code == 1
    assert "SCHOUTEN [pi1,pi1] = -2 d/dx2^d/dx3^d/dx4" in text
    assert "DIRAC: no witness=[s1,s2] = -d/dx4 is not in graphPi1" in text
    assert text.endswith("RESULT: FAIL\n")


def test_check_dirac_pass_and_inconclusive():
    assert run("check-dirac", "graphOk", "--model", DATA / "graphs.json")[0] == 0
    code, text = run("check-dirac", "loose", "--model", DATA / "graphs.json")
    assert code == 2
    assert "DIRAC: inconclusive(cap=2)" in text
    assert run("check-dirac", "loose", "--model", DATA / "graphs.json", "--degree-cap", "1")[1].count("cap=1") == 1


def test_reduce_command():
    code, text = run("reduce", "L", "x1", "x1", "--model", DATA / "poisson_x1.json")
    assert code == 0
    assert "BRACKET {x1, x1} = 0" in text
    code, text = run("reduce", "L", "x1", "x2", "--model", DATA / "poisson_x1.json")
    assert code == 0 and "BRACKET {x1, x2} = x1" in text


def test_reduce_inadmissible_fails():
    code, text = run("reduce", "A", "x1", "x2", "--model", DATA / "poisson_x1.json")
    assert code == 1
    assert "ADMISSIBLE x1: no" in text


def test_from_quotient_and_pullback():
    code, text = run("from-quotient", "--model", DATA / "quotient.json")
    assert code == 0
    assert "CANDIDATE L = span{d/dz, d/dy + dx, -d/dx + dy}" in text
    assert "ROUNDTRIP u,v PASS" in text
    for name in ("theta", "null"):
        code, text = run("pullback", name, "--model", DATA / "quotient.json")
        assert code == 0 and f"EQUIVALENCE {name},pullback({name}) PASS" in text


def test_hamiltonian_commands():
    code, text = run("check-hamiltonian", "closed", "--model", DATA / "graphs.json")
    assert code == 0 and "AGREEMENT closed PASS" in text
    code, text = run("check-hamiltonian", "open", "--model", DATA / "graphs.json")
    assert code == 1
    assert "RESIDUAL dx1^dx2^dx3 - dx1^dx2^dx4" in text
    assert "AGREEMENT open PASS" in text
    code, _ = run("check-hamiltonian", "theta", "--model", DATA / "poisson_x1.json")
    assert code == 0


def test_bialgebra_commands():
    assert run("bialgebra-verify", "--model", DATA / "bialgebra.json")[0] == 0
    code, text = run("bialgebra-check", "mixed", "--model", DATA / "bialgebra.json")
    assert code == 0 and "AD_INVARIANT: yes" in text
    code, text = run("bialgebra-check", "notIso", "--model", DATA / "bialgebra.json")
    assert code == 1 and "witness=(b0,b1)_+ = 1/2" in text
    for name in ("g", "g*"):
        assert run("bialgebra-check", name, "--model", DATA / "bialgebra.json")[0] == 0
    code, text = run("bialgebra-search", "-1,0,1", "--model", DATA / "bialgebra.json")
    assert code == 0 and "FOUND 3" in text


def test_usage_errors_exit_three(tmp_path):
    assert run("no-such-command", "--model", DATA / "graphs.json")[0] == 3
    assert run("check-dirac", "--model", DATA / "graphs.json")[0] == 3
    assert run("check-dirac", "missing", "--model", DATA / "graphs.json")[0] == 3
    assert run("check-dirac", "graphOk", "--model", tmp_path / "absent.json")[0] == 3
    assert run("check-dirac", "graphOk", "--model", DATA / "graphs.json", "--degree-cap", "-1")[0] == 3
    assert run("check-dirac", "graphOk", "--model", DATA / "graphs.json", "--point", "1,2")[0] == 3
    assert run("bialgebra-search", "1,x", "--model", DATA / "bialgebra.json")[0] == 3
    code, text = run("verify-axioms", "--model", DATA / "bad_poisson.json")
    assert code == 3
    assert "MODEL ERROR poisson: bivector is not Poisson" in text
    assert text.endswith("RESULT: ERROR\n")
    bad = write(tmp_path, '{"chart": ["x"], "options": {"degree_cap": 0.5}}')
    assert run("verify-axioms", "--model", bad)[0] == 3


def test_point_option():
    code, text = run("check-dirac", "graphOk", "--model", DATA / "graphs.json", "--point", "2,3,1/2,-1")
    assert code == 0
    assert "POINT 2,3,1/2,-1" in text


def test_out_option(tmp_path):
    out = tmp_path / "report.txt"
    code, text = run("check-dirac", "graphOk", "--model", DATA / "graphs.json", "--out", out)
    assert out.read_text() == text


def test_reports_are_deterministic(tmp_path):
    same_name = tmp_path / "quotient.json"
    renamed = tmp_path / "renamed.json"
    shutil.copy(DATA / "quotient.json", same_name)
    shutil.copy(DATA / "quotient.json", renamed)
    a = run("from-quotient", "--model", DATA / "quotient.json")
    b = run("from-quotient", "--model", DATA / "quotient.json")
    assert a == b
    assert run("from-quotient", "--model", same_name) == a
    # only the command echo in the header mentions the file name
    c = run("from-quotient", "--model", renamed)
    assert c[1] != a[1]
    assert report_body(c[1]) == report_body(a[1])


def test_thread_variable(monkeypatch):
    monkeypatch.setenv("COURANT_KIT_THREADS", "4")
    assert thread_count() == 4
    monkeypatch.setenv("COURANT_KIT_THREADS", "zero")
    with pytest.raises(UsageError):
        thread_count()
    assert run("bialgebra-verify", "--model", DATA / "bialgebra.json")[0] == 3
    monkeypatch.delenv("COURANT_KIT_THREADS")
    assert thread_count() == 1


def test_main_prints_report(capsys):
    assert main(["bialgebra-verify", "--model", str(DATA / "bialgebra.json")]) == 0
    assert capsys.readouterr().out.endswith("RESULT: PASS\n")
    assert main(["--version"]) == 0


def test_console_script_exit_code():
    exe = shutil.which("courant-kit")
    cmd = [exe] if exe else [sys.executable, "-m", "courant_kit.cli"]
    proc = subprocess.run(cmd + ["check-dirac", "graphPi1", "--model", str(DATA / "graphs.json")],
                          capture_output=True, text=True, env={**os.environ, "PYTHONPATH": "src"})
    assert proc.returncode == 1
    assert proc.stdout.endswith("RESULT: FAIL\n")
