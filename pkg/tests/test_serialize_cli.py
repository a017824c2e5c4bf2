import json

import pytest

from cartan_forge import GF, Matrix, SchemaError, Zn, construct_odac, verify_odac
from cartan_forge.cli import (
    EXIT_BUDGET,
    EXIT_INPUT,
    EXIT_NO_CONSTRUCTION,
    EXIT_NO_ODAC,
    EXIT_OK,
    EXIT_VERIFY_FAILED,
    main,
    parse_q_list,
)
from cartan_forge.serialize import (
    decomposition_from_json,
    decomposition_to_json,
    dump_json,
    load_json,
    matrix_from_json,
    matrix_to_json,
)

# ---------------------------------------------------------------- JSON documents


@pytest.mark.parametrize("ring", [Zn(9), GF(2, 2), GF(7)], ids=str)
def test_matrix_round_trip(ring):
    M = Matrix.identity(ring, 3)
    doc = json.loads(json.dumps(matrix_to_json(M)))
    assert matrix_from_json(doc) == M


def test_matrix_schema_errors():
    good = matrix_to_json(Matrix.identity(Zn(5), 2))
    for broken in (
        [],
        {**good, "ring": "Q"},
        {**good, "rows": 3},
        {**good, "entries": [[1, 0]]},
        {**good, "entries": [[1, 0], [0, "x"]]},
    ):
        with pytest.raises(SchemaError):
            matrix_from_json(broken)
    with pytest.raises(SchemaError):
        matrix_from_json(good, Zn(7))


@pytest.mark.parametrize("ring,n", [(Zn(217), 3), (Zn(9), 4), (GF(2, 2), 3)], ids=str)
def test_decomposition_round_trip(ring, n):
    D = construct_odac(ring, n)
    doc = json.loads(dump_json(decomposition_to_json(D)))
    back = decomposition_from_json(doc)
    assert back.names == D.names and back.provenance == D.provenance
    assert [H.basis_matrices for H in back.components] == [H.basis_matrices for H in D.components]
    assert verify_odac(back, classical=False).passed


def test_decomposition_schema_errors():
    doc = decomposition_to_json(construct_odac(Zn(7), 3))
    bad_trace = json.loads(json.dumps(doc))
    bad_trace["components"][1]["basis"][0]["entries"][0][0] = 3
    with pytest.raises(SchemaError, match="trace zero"):
        decomposition_from_json(bad_trace)
    with pytest.raises(SchemaError):
        decomposition_from_json({**doc, "n": 1})
    with pytest.raises(SchemaError):
        decomposition_from_json({**doc, "components": []})
    with pytest.raises(SchemaError):
        decomposition_from_json(doc, Zn(11))


def test_load_json_rejects_garbage(tmp_path):
    path = tmp_path / "x.json"
    path.write_text("{not json")
    with pytest.raises(SchemaError):
        load_json(path)


# ---------------------------------------------------------------- CLI


def test_parse_q_list():
    assert parse_q_list("5,7,11") == [5, 7, 11]
    assert parse_q_list("5..13") == [5, 7, 8, 9, 11, 13]
    assert parse_q_list("4, 9..11") == [4, 9, 11]


def test_construct_writes_file(tmp_path, capsys):
    out = tmp_path / "d.json"
    assert main(["construct", "--ring", "Z/217", "--n", "3", "--out", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert len(doc["components"]) == 4
    assert "verification passed" in capsys.readouterr().out
    assert main(["verify", "--in", str(out)]) == EXIT_OK
    assert main(["verify", "--in", str(out), "--classical"]) == EXIT_INPUT


def test_construct_no_odac(capsys):
    assert main(["construct", "--ring", "Z/9", "--n", "3"]) == EXIT_NO_ODAC
    assert "3I" in capsys.readouterr().out


def test_construct_no_construction(capsys):
    assert main(["construct", "--ring", "Z/5", "--n", "6"]) == EXIT_NO_CONSTRUCTION
    assert "not a prime power" in capsys.readouterr().out


def test_construct_json_format(capsys):
    assert main(["construct", "--ring", "F_4", "--n", "3", "--format", "json"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["verification"]["passed"] and len(doc["decomposition"]["components"]) == 4


def test_verify_zeroed_component(tmp_path, capsys):
    out = tmp_path / "d.json"
    main(["construct", "--ring", "Z/217", "--n", "3", "--out", str(out)])
    doc = json.loads(out.read_text())
    doc["components"][2]["basis"][0]["entries"] = [[0] * 3 for _ in range(3)]
    out.write_text(json.dumps(doc))
    capsys.readouterr()
    assert main(["verify", "--in", str(out), "--format", "json"]) == EXIT_VERIFY_FAILED
    report = json.loads(capsys.readouterr().out)
    assert not report["passed"]
    assert doc["components"][2]["name"] in json.dumps(report["witness"])


def test_verify_trace_injection_is_schema_error(tmp_path, capsys):
    out = tmp_path / "d.json"
    main(["construct", "--ring", "Z/7", "--n", "3", "--out", str(out)])
    doc = json.loads(out.read_text())
    doc["components"][0]["basis"][0]["entries"][0][0] = 3
    out.write_text(json.dumps(doc))
    assert main(["verify", "--in", str(out)]) == EXIT_INPUT
    assert "trace zero" in capsys.readouterr().err


def test_verify_errors(tmp_path):
    assert main(["verify", "--in", str(tmp_path / "missing.json")]) == EXIT_INPUT
    out = tmp_path / "d.json"
    main(["construct", "--ring", "Z/7", "--n", "3", "--out", str(out)])
    assert main(["verify", "--ring", "Z/11", "--in", str(out)]) == EXIT_INPUT


def test_bad_arguments_exit_1():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == EXIT_INPUT
    with pytest.raises(SystemExit) as exc:
        main(["construct", "--ring", "Z/7"])
    assert exc.value.code == EXIT_INPUT
    assert main(["construct", "--ring", "Z/1", "--n", "3"]) == EXIT_INPUT


def test_search_commands(tmp_path, capsys):
    assert main(["search-sl3", "--q", "5,7"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "q = 5: exists = false" in out and "q = 7: exists = true" in out
    path = tmp_path / "o.json"
    assert main(["oracle-lemma", "--q", "5", "--out", str(path)]) == EXIT_OK
    assert "0 counterexamples" in capsys.readouterr().out
    assert json.loads(path.read_text())[0]["counterexamples"] == []
    assert main(["remark-check", "--q", "5,11"]) == EXIT_OK
    assert "no classical pair = true" in capsys.readouterr().out
    assert main(["sl2-analysis", "--q", "7", "--format", "json"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc[0]["consistent"] and all(r["partner_is_minus_a"] for r in doc[0]["rows"])


def test_search_budget_exit(capsys):
    assert main(["oracle-lemma", "--q", "101"]) == EXIT_BUDGET
    assert main(["search-sl3", "--q", "101"]) == EXIT_BUDGET


def test_search_budget_env(monkeypatch):
    monkeypatch.setenv("CARTAN_FORGE_BUDGET_MS", "0")
    assert main(["search-sl3", "--q", "13"]) == EXIT_BUDGET


def test_search_precondition_exit():
    assert main(["remark-check", "--q", "7"]) == EXIT_INPUT


def test_ring_info(capsys):
    assert main(["ring-info", "--ring", "Z/217", "--p", "3", "--format", "json"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["primitive_root"]["u"] == 191
    assert [f["factor"] for f in doc["local_factors"]] == ["Z/7", "Z/31"]
    assert main(["ring-info", "--ring", "Z/9", "--p", "3"]) == EXIT_OK
    assert "absent" in capsys.readouterr().out


def test_module_entry_point():
    import subprocess
    import sys

    proc = subprocess.run([sys.executable, "-m", "cartan_forge", "construct", "--ring", "Z/9", "--n", "3"], capture_output=True, text=True)
    assert proc.returncode == EXIT_NO_ODAC
