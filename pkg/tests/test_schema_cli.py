import json

import pytest

from fibcat.cli import main
from fibcat.constructions import codomain_fibration, grothendieck
from fibcat.core import Functor
from fibcat.corpus import collapsing_fixture, diamond, f_bad, random_poset
from fibcat.errors import SchemaError
from fibcat.moens import satisfies_bcc
from fibcat.schema import (
    category_from_json,
    category_to_json,
    collapse_witness,
    dumps_canonical,
    expand_witness,
    fibration_from_json,
    fibration_to_json,
    functor_from_json,
    functor_to_json,
    groth_from_json,
    groth_to_json,
    loads_payload,
    parse_payload,
)


def _write(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(dumps_canonical(payload), encoding="utf-8")
    return str(path)


def test_category_round_trip_bytes(dia):
    payload = category_to_json(dia)
    text = dumps_canonical(payload)
    c2 = category_from_json(loads_payload(text))
    assert dumps_canonical(category_to_json(c2)) == text


def test_functor_round_trip_bytes():
    payload = functor_to_json(f_bad())
    text = dumps_canonical(payload)
    f2 = functor_from_json(loads_payload(text))
    assert dumps_canonical(functor_to_json(f2)) == text


def test_fibration_round_trip_bytes(cod_dia):
    payload = fibration_to_json(cod_dia)
    text = dumps_canonical(payload)
    p2 = fibration_from_json(loads_payload(text))
    assert dumps_canonical(fibration_to_json(p2)) == text


def test_groth_round_trip_bytes():
    data = collapsing_fixture()
    payload = groth_to_json(data)
    text = dumps_canonical(payload)
    d2 = groth_from_json(loads_payload(text))
    assert dumps_canonical(groth_to_json(d2)) == text
    assert grothendieck(d2).fib.total.n_objects == 3


def test_parse_payload_dispatch(dia):
    obj = parse_payload(category_to_json(dia))
    assert obj.n_objects == 4
    with pytest.raises(SchemaError):
        parse_payload({"format_version": "1", "kind": "mystery"})
    with pytest.raises(SchemaError):
        loads_payload("{not json")


def test_witness_expand_collapse_inverse(gl_bad):
    p = gl_bad.fib
    witness = satisfies_bcc(p).witness
    expanded = expand_witness(p, witness)
    assert expanded["kind"] == witness["kind"]
    assert collapse_witness(expanded) == witness


def test_cli_check_ok(tmp_path, capsys, dia):
    path = _write(tmp_path, "dia.json", category_to_json(dia))
    assert main(["check", path]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["kind"] == "check-report"
    assert report["ok"] is True
    assert report["violations"] == []
    assert report["input_kind"] == "category"


def test_cli_check_law_violation(tmp_path, capsys):
    payload = {
        "format_version": "1",
        "kind": "category",
        "objects": ["x"],
        "morphisms": [
            {"id": "1x", "src": "x", "tgt": "x"},
            {"id": "f", "src": "x", "tgt": "x"},
        ],
        "identities": {"x": "1x"},
        # f . f is undefined: composability closure fails
        "composition": [["1x", "1x", "1x"], ["f", "1x", "f"], ["1x", "f", "f"]],
    }
    path = _write(tmp_path, "broken.json", payload)
    assert main(["check", path]) == 2


def test_cli_malformed_input(tmp_path):
    path = tmp_path / "junk.json"
    path.write_text("{oops", encoding="utf-8")
    assert main(["check", str(path)]) == 1
    assert main(["check", str(tmp_path / "missing.json")]) == 1


def test_cli_analyze_identity_gluing(tmp_path, capsys, dia):
    path = _write(tmp_path, "glid.json", functor_to_json(Functor.identity(dia)))
    assert main(["analyze", path]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["verdict"] is True
    names = {row["name"] for row in report["results"]}
    assert "bcc" in names and "moens" in names


def test_cli_analyze_failing_predicate(tmp_path, capsys):
    path = _write(tmp_path, "fbad.json", functor_to_json(f_bad()))
    assert main(["analyze", path, "--predicates", "bcc"]) == 3
    report = json.loads(capsys.readouterr().out)
    row = next(r for r in report["results"] if r["name"] == "bcc")
    assert row["holds"] is False
    assert row["witness"]["kind"] == "bcc-square"


def test_cli_analyze_requested_gate_failure(tmp_path):
    path = _write(tmp_path, "poset.json", category_to_json(random_poset(3)))
    # a bare category is not fibration input
    assert main(["analyze", path]) == 1


def test_cli_analyze_precondition_exit(tmp_path):
    g = groth_to_json(collapsing_fixture())
    path = _write(tmp_path, "collapse.json", g)
    assert main(["analyze", path, "--predicates", "disjointness"]) == 4


def test_cli_analyze_collapse_fails_defaults(tmp_path, capsys):
    g = groth_to_json(collapsing_fixture())
    path = _write(tmp_path, "collapse.json", g)
    assert main(["analyze", path]) == 3
    report = json.loads(capsys.readouterr().out)
    assert report["verdict"] is False


def test_cli_analyze_skips_gated_predicates(tmp_path, capsys, dia):
    import numpy as np

    from fibcat.corpus import one
    from fibcat.fibration import Fibration

    pt = one()
    proj = Functor(
        pt, dia,
        np.array([dia.o("bot")], dtype=np.int32),
        np.array([dia.identity(dia.o("bot"))], dtype=np.int32),
    )
    path = _write(tmp_path, "point.json", fibration_to_json(Fibration(pt, dia, proj)))
    assert main(["analyze", path]) == 0
    report = json.loads(capsys.readouterr().out)
    assert all("skipped" in row for row in report["results"])


def test_cli_analyze_deterministic_across_jobs(tmp_path, dia):
    path = _write(tmp_path, "glid.json", functor_to_json(Functor.identity(dia)))
    out1 = tmp_path / "r1.json"
    out2 = tmp_path / "r2.json"
    assert main(["analyze", path, "--jobs", "1", "--out", str(out1)]) == 0
    assert main(["analyze", path, "--jobs", "4", "--out", str(out2)]) == 0
    lines1 = [l for l in out1.read_text().splitlines() if "timing_ms" not in l]
    lines2 = [l for l in out2.read_text().splitlines() if "timing_ms" not in l]
    assert lines1 == lines2


def test_cli_roundtrip_functor(tmp_path, capsys, dia):
    path = _write(tmp_path, "glid.json", functor_to_json(Functor.identity(dia)))
    assert main(["roundtrip", path]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["verdict"] is True
    assert report["direction"] == "phi-psi"


def test_cli_roundtrip_generalized(tmp_path, capsys):
    path = _write(tmp_path, "fbad.json", functor_to_json(f_bad()))
    assert main(["roundtrip", path]) == 4
    assert main(["roundtrip", path, "--mode", "generalized"]) == 0


def test_cli_gen_kinds_validate(tmp_path):
    for kind in ("poset", "lattice", "finset", "groth", "gluing"):
        out = tmp_path / f"{kind}.json"
        assert main(["gen", "--kind", kind, "--seed", "3", "--out", str(out)]) == 0
        assert main(["check", str(out)]) == 0


def test_cli_gen_deterministic(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    assert main(["gen", "--kind", "poset", "--seed", "7", "--out", str(a)]) == 0
    assert main(["gen", "--kind", "poset", "--seed", "7", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    c = tmp_path / "c.json"
    assert main(["gen", "--kind", "poset", "--seed", "8", "--out", str(c)]) == 0
    assert a.read_bytes() != c.read_bytes()


def test_cli_size_guard_exit(tmp_path):
    out = tmp_path / "fs.json"
    assert main(["gen", "--kind", "finset", "--size", "4", "--max-morphisms", "100",
                 "--out", str(out)]) == 5


def test_cli_arrow_cat(tmp_path, capsys, dia):
    path = _write(tmp_path, "dia.json", category_to_json(dia))
    out = tmp_path / "arr.json"
    assert main(["arrow-cat", path, "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert len(payload["objects"]) == 9
    assert len(payload["morphisms"]) == 36


def test_cli_gluing_and_groth_outputs(tmp_path, dia):
    fpath = _write(tmp_path, "glid.json", functor_to_json(Functor.identity(dia)))
    gout = tmp_path / "gl.json"
    assert main(["gluing", fpath, "--out", str(gout)]) == 0
    assert main(["check", str(gout)]) == 0
    gpath = _write(tmp_path, "groth.json", groth_to_json(collapsing_fixture()))
    tout = tmp_path / "total.json"
    assert main(["groth", gpath, "--out", str(tout)]) == 0
    assert main(["check", str(tout)]) == 0


def test_cli_free_cocart(tmp_path, dia):
    fpath = _write(tmp_path, "fib.json", fibration_to_json(codomain_fibration(dia)[0]))
    out = tmp_path / "fam.json"
    assert main(["free-cocart", fpath, "--out", str(out)]) == 0
    assert main(["check", str(out)]) == 0
