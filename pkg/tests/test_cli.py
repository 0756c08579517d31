import json
import os

import numpy as np
import pytest

from anoctl.cli import domain_check_main, main
from anoctl.forms import matrix_to_json
from anoctl.presets import schottky_o21


def read(path):
    with open(path) as fh:
        return fh.read()


def test_table1_all_verified(tmp_path, capsys):
    assert main(["table1", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert out.count("yes") == 10 and "NO" not in out
    data = json.loads(read(tmp_path / "table1.json"))
    assert len(data["rows"]) == 10
    assert all(r["verified"] for r in data["rows"])
    assert data["schema_version"] == 1


def test_cartan_single_diagonal_matrix(tmp_path):
    gens_path = tmp_path / "gens.json"
    entry = {"name": "d", **matrix_to_json(np.diag([4.0, 2.0, 1.0]))}
    gens_path.write_text(json.dumps([entry]))
    code = main(["cartan", "--gens", str(gens_path), "--form", "",
                 "--out", str(tmp_path)])
    assert code == 0
    data = json.loads(read(tmp_path / "cartan.json"))
    rec, = data["records"]
    assert rec["mu"] == pytest.approx([np.log(4), np.log(2), 0.0])
    assert rec["gaps"]["alpha_1"] == pytest.approx(np.log(2))


def test_cartan_batch_preserves_order_and_flags_errors(tmp_path):
    gens_path = tmp_path / "gens.json"
    bad = {"name": "x", **matrix_to_json(np.diag([2.0, 1.0, 1.0]))}
    form, gens = schottky_o21()
    good = {"name": "a", **matrix_to_json(gens[0][1])}
    gens_path.write_text(json.dumps([good, bad]))
    code = main(["cartan", "--gens", str(gens_path), "--form", "2,1",
                 "--out", str(tmp_path)])
    assert code == 1
    data = json.loads(read(tmp_path / "cartan.json"))
    assert [r["name"] for r in data["records"]] == ["a"]
    assert data["errors"][0]["name"] == "x"


def test_limitset_builtin_emits_csv_and_svg(tmp_path):
    code = main(["limitset", "--radius", "4", "--out", str(tmp_path)])
    assert code == 0
    csv = read(tmp_path / "limitset.csv")
    assert csv.startswith("word,word_length,gap,")
    svg = read(tmp_path / "limitset.svg")
    assert svg.startswith("<svg") and "<circle" in svg


def test_ball_command(tmp_path):
    code = main(["ball", "--radius", "2", "--out", str(tmp_path)])
    assert code == 0
    data = json.loads(read(tmp_path / "ball.json"))
    assert len(data["elements"]) == 17
    assert data["elements"][0]["word"] == ""
    assert not data["truncated"]


def test_ball_command_cap(tmp_path):
    code = main(["ball", "--radius", "3", "--cap", "8", "--out", str(tmp_path)])
    assert code == 0
    data = json.loads(read(tmp_path / "ball.json"))
    assert data["truncated"] and len(data["elements"]) == 8


def test_divergence_csv(tmp_path):
    code = main(["divergence", "--radius", "3", "--out", str(tmp_path)])
    assert code == 0
    lines = read(tmp_path / "divergence.csv").strip().split("\n")
    assert lines[0] == "radius,root,min_gap,word"
    assert len(lines) == 5  # radii 0..3 plus header


def test_domain_radius_zero_report(tmp_path):
    code = main(["domain", "--radius", "0", "--samples", "20",
                 "--out", str(tmp_path)])
    assert code == 0
    data = json.loads(read(tmp_path / "domain.json"))
    assert data["sample_size"] == 0
    assert data["relation_flags"] == []
    assert data["bad_set_hits"] == 0
    assert len(data["coverage_curve"]) == 4


def test_domain_check_alias(tmp_path):
    report = tmp_path / "report.json"
    code = domain_check_main(["--form", "2,1", "--gens", "builtin:schottky-o21",
                              "--radius", "3", "--samples", "10",
                              "--report", str(report), "--out", str(tmp_path)])
    assert code == 0
    data = json.loads(read(report))
    assert {"bad_set_hits", "relation_flags", "coverage_curve",
            "expansion_certificates"} <= set(data)


def test_orbits_outputs(tmp_path):
    code = main(["orbits", "--type", "A", "--rank", "2", "--support", "all",
                 "--out", str(tmp_path)])
    assert code == 0
    data = json.loads(read(tmp_path / "orbits.json"))
    assert len(data["orbits"]) == 4
    dot = read(tmp_path / "orbits.dot")
    assert dot.startswith("digraph")


def test_orbits_adjoint_support(tmp_path):
    code = main(["orbits", "--type", "G2", "--rank", "2",
                 "--support", "adjoint", "--out", str(tmp_path)])
    assert code == 0
    data = json.loads(read(tmp_path / "orbits.json"))
    assert data["support"] == [2]


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("radius = 2\nout = {}\nseed = 7\n".format(tmp_path))
    code = main(["limitset", "--config", str(cfg), "--radius", "4"])
    assert code == 0  # flag wins over file; just exercising the path
    assert (tmp_path / "limitset.csv").exists()


def test_unknown_config_key_rejected(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("radios = 2\n")
    assert main(["limitset", "--config", str(cfg)]) == 2


def test_determinism_byte_identical(tmp_path):
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    for out in (out1, out2):
        assert main(["table1", "--out", str(out)]) == 0
        assert main(["limitset", "--radius", "4", "--seed", "3",
                     "--out", str(out)]) == 0
        assert main(["domain", "--radius", "3", "--samples", "15",
                     "--seed", "3", "--out", str(out)]) == 0
    for name in ("table1.json", "limitset.csv", "limitset.svg", "domain.json"):
        assert read(out1 / name) == read(out2 / name), name
