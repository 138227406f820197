import json
import subprocess
import sys
from pathlib import Path

import pytest

from potatoes.cli import main
from potatoes.mesh import load_mesh


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


@pytest.fixture
def ring(tmp_path, capsys):
    path = tmp_path / "ring.json"
    code, out = run(capsys, "generate", "--family", "fatring", "--param", "delta=pi/3", "--param", "l=2",
                    "--out", str(path))
    assert code == 0
    info = json.loads(out)
    assert info["n"] == 19 and info["triangles"] == 24
    return path


def test_generate_writes_loadable_mesh(ring):
    assert load_mesh(ring).n == 19


def test_validate_reports_metrics(ring, capsys):
    code, out = run(capsys, "validate", "--mesh", str(ring))
    body = json.loads(out)
    assert code == 0 and body["validation"]["valid"]
    assert body["metrics"]["is_maximal"]


def test_validate_flags_broken_mesh(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"vertices": [[0, 1, 0, 1], [4, 1, 0, 1], [0, 1, 4, 1],
                                            [1, 1, 1, 1], [5, 1, 1, 1], [1, 1, 5, 1]],
                               "triangles": [[0, 1, 2], [3, 4, 5]]}))
    code, out = run(capsys, "validate", "--mesh", str(bad))
    assert code == 1 and not json.loads(out)["validation"]["valid"]


def test_count_with_gamma_and_emit(ring, tmp_path, capsys):
    emit = tmp_path / "p.jsonl"
    code, out = run(capsys, "count", "--mesh", str(ring), "--carrots", "--gamma", "2", "--emit", str(emit),
                    "--deterministic")
    body = json.loads(out)
    assert code == 0
    assert body["potato_count"] == len(emit.read_text().splitlines())
    assert body["fat_potato_count"] <= body["potato_count"]
    assert "stats" not in body


def test_count_is_deterministic(ring, capsys):
    _, a = run(capsys, "count", "--mesh", str(ring), "--carrots", "--deterministic")
    _, b = run(capsys, "--threads", "2", "count", "--mesh", str(ring), "--carrots", "--deterministic")
    assert a == b


def test_global_flags_after_the_verb(ring, tmp_path, capsys):
    out = tmp_path / "count.json"
    code, _ = run(capsys, "count", "--mesh", str(ring), "--out", str(out), "--precision-bits", "128")
    assert code == 0 and json.loads(out.read_text())["potato_count"] > 0


def test_certify_passes(ring, capsys):
    code, out = run(capsys, "certify", "--mesh", str(ring), "--checks", "observations,signatures,skeletons")
    body = json.loads(out)
    assert code == 0 and body["pass"]
    assert set(body["checks"]) == {"observations", "signatures", "skeletons"}


def test_render_with_highlights(ring, tmp_path, capsys):
    emit = tmp_path / "p.jsonl"
    run(capsys, "count", "--mesh", str(ring), "--emit", str(emit))
    svg = tmp_path / "r.svg"
    code, _ = run(capsys, "render", "--mesh", str(ring), "--highlight", str(emit), "--limit", "5",
                  "--out", str(svg))
    assert code == 0 and svg.read_text().count("<polygon") == 5


def test_analyze_small_experiment(tmp_path, capsys):
    spec = {"name": "grid_small", "family": "grid", "sweep": {"m": [2, 3, 4, 5]}, "measure": "carrots",
            "fit": "Polynomial", "checks": [{"kind": "exact", "predicted": "carrots"},
                                            {"kind": "oracle"}],
            "outputs": {"json": "g.json", "csv": "g.csv", "png": "g.png"}}
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(spec))
    code, out = run(capsys, "analyze", str(path), "--out", str(tmp_path / "res"))
    body = json.loads(out)
    assert code == 0 and body["pass"]
    assert (tmp_path / "res" / "g.csv").read_text().splitlines()[0] == "m,vertices,triangles,count"
    assert (tmp_path / "res" / "g.png").exists()


def test_missing_mesh_exits_with_two(tmp_path, capsys):
    assert main(["validate", "--mesh", str(tmp_path / "nope.json")]) == 2


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "potatoes", "generate", "--family", "grid", "--param", "m=3",
                          "--out", str(tmp_path / "g.json")], capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert json.loads(res.stdout)["n"] == 6


def test_invalid_parameter_exits_with_code_two(capsys):
    assert main(["generate", "--family", "fatring", "--param", "delta=3", "--param", "l=2"]) == 2
    assert "delta" in capsys.readouterr().err
