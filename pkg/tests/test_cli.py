import json

import pytest

from toricforms.cli import (
    ParseError,
    ValidationError,
    dispatch,
    fan_document,
    load_fan,
    main,
    parse_fan_document,
)
from toricforms.paperlab import huge_fan, tau_fan

TAU_DOC = {"lattice_rank": 3, "rays": [[1, 0, 0], [1, 2, 0]], "cones": [[0, 1]]}
HUGE_DOC = {"lattice_rank": 3, "rays": [[1, 0, 0], [1, 2, 0], [-1, 0, 1], [-1, 0, -1]],
            "cones": [[0, 1, 2], [0, 1, 3]]}


def _write(tmp_path, doc, name="fan.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def test_documents_load(tmp_path):
    assert load_fan(_write(tmp_path, TAU_DOC)) == tau_fan()
    assert load_fan(_write(tmp_path, HUGE_DOC)) == huge_fan()
    assert load_fan(fixture="huge") == huge_fan()


def test_malformed_index_names_cone():
    with pytest.raises(ParseError, match="cone 1"):
        parse_fan_document({"lattice_rank": 2, "rays": [[1, 0], [0, 1]], "cones": [[0, 1], [0, 5]]})


@pytest.mark.parametrize("doc", [
    [],
    {"rays": [], "cones": []},
    {"lattice_rank": 2, "rays": [[1, 0, 0]], "cones": []},
    {"lattice_rank": 2, "rays": [[1, 0]], "cones": ["a"]},
])
def test_parse_errors(doc):
    with pytest.raises(ParseError):
        parse_fan_document(doc)


def test_validation_error_on_overlap():
    doc = {"lattice_rank": 2, "rays": [[1, 0], [0, 1], [1, 1], [-1, 1]], "cones": [[0, 1], [2, 3]]}
    with pytest.raises(ValidationError):
        parse_fan_document(doc)


@pytest.mark.parametrize("fixture", ["tau", "huge", "p1", "a1", "orthant"])
def test_round_trip(fixture):
    f = load_fan(fixture=fixture)
    assert parse_fan_document(json.loads(json.dumps(fan_document(f)))) == f


def test_hugeK1_command(capsys):
    assert main(["paper", "hugeK1", "--window", "2"]) == 0
    out = capsys.readouterr().out
    assert "[-2,2]^3" in out
    assert "1,0,-2\t1\t1\t2\t3" in out


def test_p1_cech_command(tmp_path, capsys):
    path = _write(tmp_path, {"lattice_rank": 1, "rays": [[1], [-1]], "cones": [[0], [1]]})
    assert main(["cech", "cohomology", "--fan", path, "--sheaf", "tilde:1", "--weight", "0"]) == 0
    assert "0\t0\t1" in capsys.readouterr().out


def test_resolve_command():
    rep = dispatch(["fan", "resolve", "--fixture", "tau"])
    assert rep.ok
    text = rep.render()
    assert "trail" in text


def test_structured_output_and_determinism():
    argv = ["forms", "table", "--rays", "1,0,0;1,2,0", "--window", "1", "--format", "structured"]
    a, b = dispatch(argv).render(), dispatch(argv).render()
    assert a == b
    assert json.loads(a)["verdict"] == "pass"


def test_parallel_matches_serial():
    argv = ["cech", "cone", "--fixture", "huge", "--window", "1"]
    assert dispatch(argv).render() == dispatch(argv + ["--parallel"]).render()


def test_exit_codes(capsys):
    assert main(["dilate", "trace", "--rays", "1,0,0;1,2,0", "--weight", "1,0,0", "--seq", "2"]) == 1
    assert main(["nope", "x"]) == 2
    assert main(["cone", "frobnicate", "--rays", "1,0"]) == 2
    assert main(["cech", "cohomology", "--fan", "/nonexistent.json"]) == 2
    assert main(["paper", "hugeK1", "--window", "-1"]) == 2
    capsys.readouterr()


@pytest.mark.parametrize("argv", [
    ["cone", "dual", "--rays", "1,0;1,2"],
    ["cone", "faces", "--rays", "1,0;1,2"],
    ["cone", "classify", "--rays", "1,0;1,2"],
    ["monoid", "hilbert", "--rays", "1,0;1,2"],
    ["monoid", "split", "--rays", "1,0,0;1,2,0"],
    ["fan", "validate", "--fixture", "huge"],
    ["fan", "subdivide", "--fixture", "a1", "--ray", "1,1"],
    ["fan", "square", "--fixture", "a1", "--ray", "1,1", "--window", "1"],
    ["cech", "hyper", "--fixture", "p1", "--t", "1", "--window", "1"],
    ["dilate", "hh", "--rays", "1,0;1,2", "--weight", "1,0", "--seq", "2,2"],
    ["paper", "huge", "--window", "1"],
    ["paper", "k0", "--fixture", "tau", "--window", "1"],
    ["paper", "identities", "--fixture", "huge", "--window", "1"],
])
def test_every_command_passes(argv, capsys):
    assert main(argv) == 0
    assert capsys.readouterr().out.startswith("# command")
