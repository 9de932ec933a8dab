from __future__ import annotations

import json
import re


from tpqrkit.cli import main, render_dynkin
from tpqrkit.divides import acampo_form, four_lines_divide
from tpqrkit.lattice import IntersectionLattice, gabrielov_tpqr_form


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_dot_t333(capsys):
    code, out, _ = run(capsys, "tpqr", "3", "3", "3", "--format", "dot")
    assert code == 0
    assert len(re.findall(r"^  n\d+ \[label=", out, re.M)) == 8
    # A and B each meet P1, Q1, R1 once; three arm edges; one -2 edge A--B
    assert out.count(" -- ") == 10
    assert out.count("style=dashed") == 1
    assert 'n0 -- n1 [style=dashed, label="-2"]' in out


def test_render_small_and_labels():
    assert render_dynkin(IntersectionLattice(["a"], [[-2]])).count("--") == 0
    g = [[-2, 3], [3, -2]]
    assert 'label="3"' in render_dynkin(IntersectionLattice(["a", "b"], g))


def test_render_four_lines_stable():
    lat = acampo_form(four_lines_divide()).lattice
    a, b = render_dynkin(lat), render_dynkin(lat)
    assert a == b and len(re.findall(r"^  n\d+ \[label=", a, re.M)) == 9


def test_lattice_roundtrip(tmp_path, capsys):
    p = tmp_path / "l.json"
    p.write_text(gabrielov_tpqr_form(3, 4, 5).to_json())
    code, out, _ = run(capsys, "lattice", "--lattice", str(p))
    assert code == 0
    again = tmp_path / "again.json"
    again.write_text(out)
    code, out2, _ = run(capsys, "lattice", "--lattice", str(again))
    assert out == out2
    d = json.loads(out)
    assert d["invariants"]["nullity"] == 1
    assert d["torus_class"] == {"in_nullspace": True, "primitive": True}


def test_mutate_keeps_invariants(tmp_path, capsys):
    lat = tmp_path / "l.json"
    lat.write_text(gabrielov_tpqr_form(4, 5, 2, strict=False).to_json())
    script = tmp_path / "s.mut"
    script.write_text("R 1\nL 3\nC 2\nR 5\n")
    code, out, _ = run(capsys, "mutate", "--lattice", str(lat), "--script", str(script))
    assert code == 0
    assert json.loads(out)["invariants_unchanged"] is True


def test_malformed_json_exit_2(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{"labels": ["a"],\n  "gram": [[-2]\n')
    code, _, err = run(capsys, "lattice", "--lattice", str(p))
    assert code == 2
    assert "line" in err and "column" in err


def test_input_errors(tmp_path, capsys):
    assert run(capsys, "lattice", "--lattice", str(tmp_path / "missing.json"))[0] == 2
    assert run(capsys, "nonsense")[0] == 2
    assert run(capsys, "tpqr", "3", "3", "2")[0] == 2
    assert run(capsys, "track", "--family", "M", "--tol-escape", "-1")[0] == 2
    assert run(capsys, "track", "--family", "tpqr_germ", "--param", "p=3", "--param", "q=3",
               "--param", "r=3", "--param", "a=-3")[0] == 2


def test_verification_failure_exit_1(capsys):
    code, out, _ = run(capsys, "quiver", "3", "3", "3", "--verify", "--perturb")
    assert code == 1
    assert json.loads(out)["pass"] is False


def test_quiver_roundtrip(tmp_path, capsys):
    code, out, _ = run(capsys, "quiver", "3", "4", "5")
    p = tmp_path / "q.json"
    p.write_text(out)
    code, out, _ = run(capsys, "quiver", "3", "4", "5", "--verify", "--quiver", str(p))
    assert code == 0


def test_floer_point(capsys):
    code, out, _ = run(capsys, "floer", "3", "3", "3", "--alpha", "1", "--beta", "2")
    d = json.loads(out)["cohomology"]
    assert d["A"] == {"0": 1, "1": 1} and d["R1"] == {}


def test_out_is_written(tmp_path, capsys):
    p = tmp_path / "o.dot"
    assert main(["tpqr", "3", "3", "4", "--format", "dot", "--out", str(p)]) == 0
    assert p.read_text().startswith("graph dynkin")
    assert not [x for x in tmp_path.iterdir() if x.name.startswith(".tmp-")]


def test_track_csv(capsys):
    code, out, _ = run(capsys, "track", "--family", "M", "--format", "csv")
    assert code == 0
    rows = [r.split(",") for r in out.splitlines()[1:]]
    assert len({r[1] for r in rows}) == 14
    assert len({r[1] for r in rows if r[4] == "1"}) == 6


def test_solve_only(capsys):
    code, out, _ = run(capsys, "track", "--family", "check_m")
    d = json.loads(out)
    assert d["count"] == 7 and len(d["distinct_values"]) == 4


def test_floer_surgery(tmp_path, capsys):
    p = tmp_path / "s.json"
    p.write_text('{"disc_areas": [1.0, 1.5], "surgery_params": [0.1, 0.1], "index_diff": 0}')
    code, out, _ = run(capsys, "floer", "3", "3", "3", "--surgery", str(p), "--tol-area", "0.1")
    assert code == 1 and json.loads(out)["exact"] is False
    code, _, _ = run(capsys, "floer", "3", "3", "3", "--surgery", str(p), "--tol-area", "1")
    assert code == 0
    p.write_text('{"disc_areas": [1.0]}')
    assert run(capsys, "floer", "3", "3", "3", "--surgery", str(p))[0] == 2
