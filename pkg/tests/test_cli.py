import json
import subprocess
import sys

import pytest

from tiler.cli import main


def run(args):
    return main([str(a) for a in args])


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def test_tile_writes_schema_and_run_echo(tmp_path):
    out = tmp_path / "tiling.json"
    assert run(["tile", "--family", "cycle-chord", "--out", out]) == 0
    doc = read_json(out)
    assert doc["schema"] == "tiler-tiling/1"
    assert doc["audit"]["passed"] is True
    echo = doc["run"]
    assert echo["argv"][0] == "tile"
    assert echo["tool"]["name"] == "tiler"
    assert "time" not in json.dumps(doc).lower()


def test_tile_is_deterministic(tmp_path):
    # the out path is part of the echoed argv, so rerun into the same file
    out = tmp_path / "a.json"
    run(["tile", "--family", "perturbed-tree", "--depth", 5, "--out", out])
    first = out.read_bytes()
    run(["tile", "--family", "perturbed-tree", "--depth", 5, "--out", out])
    assert out.read_bytes() == first


def test_tile_side_render_carries_the_echo(tmp_path):
    out, svg = tmp_path / "t.json", tmp_path / "t.svg"
    assert run(["tile", "--family", "cycle-chord", "--out", out,
                "--render", svg]) == 0
    text = svg.read_text()
    assert text.startswith('<?xml version="1.0" encoding="UTF-8"?>')
    assert "<?tiler-run {" in text


def test_corrupt_input_names_the_missing_field(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"schema": "tiler-graph/1",
                               "vertices": ["a"], "edges": []}))
    assert run(["tile", "--input", bad]) == 1
    assert "rotation" in capsys.readouterr().err


def test_unknown_family_is_an_input_error(capsys):
    assert run(["tile", "--family", "moebius"]) == 1
    assert "moebius" in capsys.readouterr().err


def test_impossible_tolerance_fails_the_audit(tmp_path):
    out = tmp_path / "t.json"
    code = run(["tile", "--family", "z2-half-disc", "--radius", 4,
                "--tolerance", "1e-30", "--out", out])
    assert code == 2
    assert read_json(out)["audit"]["passed"] is False


def test_verify_all_passes_on_a_tree(tmp_path):
    out = tmp_path / "report.json"
    code = run(["verify", "--family", "binary-tree", "--depth", 8, "--all",
                "--trials", 100000, "--seed", 42, "--out", out])
    assert code == 0
    doc = read_json(out)
    assert doc["schema"] == "tiler-audit/1"
    assert doc["all_passed"] is True
    names = {i["name"] for i in doc["items"]}
    assert {"tiling-identities", "layeredness", "interior-flux",
            "meridian-crossings"} <= names
    assert all(i["passed"] in (True, None) for i in doc["items"])


def test_walk_exit_counts_as_json(tmp_path):
    out = tmp_path / "walk.json"
    assert run(["walk", "--family", "binary-tree", "--depth", 4,
                "--trials", 2000, "--seed", 7, "--out", out]) == 0
    doc = read_json(out)
    assert doc["schema"] == "tiler-stats/1"
    assert sum(doc["counts"].values()) == 2000
    assert doc["run"]["seed"] == 7


def test_walk_csv_carries_the_echo_line(tmp_path):
    out = tmp_path / "walk.csv"
    assert run(["walk", "--family", "binary-tree", "--depth", 4,
                "--trials", 500, "--format", "csv", "--out", out]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# tiler:run {")
    assert lines[1] == "vertex,count,frequency"
    assert len(lines) == 2 + 16


def test_walk_trajectory_with_arcs(tmp_path):
    out = tmp_path / "traj.json"
    assert run(["walk", "--family", "binary-tree", "--depth", 6,
                "--kind", "trajectory", "--arcs", "0.1:0.6",
                "--trials", 2000, "--out", out]) == 0
    doc = read_json(out)
    masses = doc["arc_masses"]
    assert len(masses) == 1
    assert abs(masses[0]["mass"] - 0.5) < 0.06


def test_boundary_with_verification(tmp_path):
    out = tmp_path / "sharp.json"
    code = run(["boundary", "--family", "binary-tree", "--depth", 8,
                "--arcs", "0:0.5", "--levels", "6,7,8",
                "--gap-tol", "5e-3", "--verify",
                "--trials", 8000, "--out", out])
    assert code == 0
    doc = read_json(out)
    assert doc["schema"] == "tiler-sharp/1"
    assert doc["converged"] is True
    assert abs(doc["probe_values"]["o"] - 0.5) < 0.02


@pytest.mark.parametrize(
    "args",
    [
        ["tile", "--family", "cycle-chord"],
        ["verify", "--family", "binary-tree", "--depth", "8", "--tiling",
         "--meridian", "--trials", "4000"],
        ["walk", "--family", "binary-tree", "--depth", "4",
         "--trials", "1000"],
        ["walk", "--family", "binary-tree", "--depth", "4",
         "--trials", "800", "--format", "csv"],
        ["render", "--family", "cycle-chord"],
        ["boundary", "--family", "binary-tree", "--depth", "6",
         "--arcs", "0:0.5", "--levels", "4,5"],
    ],
)
def test_reproduce_accepts_every_artifact(tmp_path, args):
    out = tmp_path / ("artifact.csv" if "csv" in args else "artifact.out")
    assert run(args + ["--out", out]) == 0
    assert run(["reproduce", out]) == 0


def test_reproduce_detects_tampering(tmp_path, capsys):
    out = tmp_path / "walk.json"
    run(["walk", "--family", "binary-tree", "--depth", 4,
         "--trials", 1000, "--out", out])
    doc = read_json(out)
    key = next(iter(doc["counts"]))
    doc["counts"][key] += 1
    out.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    assert run(["reproduce", out]) == 2
    assert "mismatch" in capsys.readouterr().err


def test_reproduce_rejects_unknown_schema_version(tmp_path, capsys):
    out = tmp_path / "t.json"
    run(["tile", "--family", "cycle-chord", "--out", out])
    text = out.read_text().replace("tiler-tiling/1", "tiler-tiling/2")
    out.write_text(text)
    assert run(["reproduce", out]) == 1
    assert "/1" in capsys.readouterr().err


def test_missing_required_argument_exits_one(capsys):
    assert run(["boundary", "--family", "binary-tree", "--depth", 4]) == 1
    assert "--arcs" in capsys.readouterr().err


def test_console_script_reports_version():
    res = subprocess.run([sys.executable, "-m", "tiler.cli", "--version"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout.startswith("tiler ")
