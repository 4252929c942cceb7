import csv
import json

import pytest

from viscoevans import pipeline as pl
from viscoevans.cli import main
from viscoevans.svg import Figure, image_curve_svg


def _lines(capsys):
    return [json.loads(x) for x in capsys.readouterr().out.splitlines() if x.startswith("{")]


def test_single_shear_writes_all_outputs(tmp_path, capsys):
    rc = main(["single", "--model", "shear2d", "--connect", "1,0:0.8,0", "--s", "1.8547",
               "--profile-csv", str(tmp_path / "p.csv"), "--json-dir", str(tmp_path / "j"),
               "--svg-dir", str(tmp_path / "svg"), "--csv", str(tmp_path / "r.csv")])
    assert rc == 0
    out = [x for x in _lines(capsys) if x["status"] == "computed"]
    assert len(out) == 1 and out[0]["verdict"] == "Stable" and out[0]["winding"] == 0
    blob = json.loads((tmp_path / "j" / "contour_0.json").read_text())
    assert set(blob) == {"model", "alpha", "s", "R", "n_points", "max_rel_step", "L", "winding", "verdict"}
    header = (tmp_path / "p.csv").read_text().splitlines()[0]
    assert header == "z,a1,a2,b1,b2,a1p,a2p,b1p,b2p"
    with open(tmp_path / "r.csv", newline="") as fh:
        assert next(csv.reader(fh)) == pl.CSV_HEADER
    for name in ("profile_0.svg", "evans_0.svg"):
        assert (tmp_path / "svg" / name).read_text().startswith("<svg")


def test_filtered_left_state_exits_zero(capsys):
    assert main(["single", "--model", "comp1d", "--alpha", "0.5", "--s", "1.0"]) == 0
    (line,) = _lines(capsys)
    assert line["status"] == "filtered" and "hyperbolic" in line["reason"]


def test_uncertified_radius_exits_two(capsys):
    rc = main(["single", "--model", "comp1d", "--alpha", "0.8", "--s", "1.0", "--set", "r_max=1"])
    assert rc == 2
    assert any(x.get("verdict", "").startswith("Inconclusive") for x in _lines(capsys))


@pytest.mark.parametrize("argv", [
    ["single", "--model", "shear2d", "--alpha", "1,0"],
    ["single", "--model", "nonsense", "--alpha", "1", "--s", "1"],
    ["single", "--model", "shear2d", "--alpha", "1,0", "--s", "1", "--set", "unknown_key=3"],
    ["single", "--model", "shear2d", "--alpha", "1,0", "--s", "abc"],
    ["sweep", "--model", "comp1d", "--alpha3", "0.7:0:0.8", "--s", "1"],
    ["dispersion"],
    ["nosuchcommand"],
])
def test_bad_input_exits_one(argv, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    with pytest.raises(SystemExit) as e:
        raise SystemExit(main(argv))
    assert e.value.code == 1


def test_sweep_with_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("model = comp1d\nalpha3 = 0.7:0.1:0.8\n")
    out = tmp_path / "sw.csv"
    assert main(["sweep", "--config", str(cfg), "--s", "1.0", "--out", str(out)]) == 0
    summary = _lines(capsys)[-1]
    assert summary["cases"] == 2 and summary["rows"] == len(pl.read_csv_records(out))
    assert main(["sweep", "--config", str(cfg), "--s", "1.0", "--out", str(out)]) == 0
    assert _lines(capsys)[-1]["evaluations"] == 0


def test_dispersion_and_ucsearch(capsys):
    assert main(["dispersion", "--a3", "0.3", "--k", "0.001:0.001:0.005"]) == 0
    d = _lines(capsys)[0]
    assert d["max_residual"] <= 1e-12 and len(d["k"]) == 5
    assert main(["ucsearch", "--alpha1", "1:1:2", "--s", "1.8:1:2.8"]) == 0
    u = _lines(capsys)[0]
    assert u["parameters"] == 4 and u["connections"] == 0


def test_portrait_is_deterministic(tmp_path, capsys):
    args = ["portrait", "--alpha", "1,0", "--sigma", "2.75", "--seeds", "12"]
    assert main(args + ["--out", str(tmp_path / "a.svg")]) == 0
    assert main(args + ["--out", str(tmp_path / "b.svg")]) == 0
    assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()
    eq = _lines(capsys)[0]["equilibria"]
    assert sorted(e["type"] for e in eq) == ["Attractor", "Repellor", "Saddle"]


def test_selftest_passes(capsys):
    assert main(["selftest"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 4 and all(x.startswith("PASS") for x in lines)


def test_empty_image_svg_has_axes_only():
    svg = image_curve_svg([], "empty")
    assert svg.startswith("<svg") and "<polyline" not in svg
    fig = Figure((0, 1), (0, 1))
    fig.polyline([0.0, float("nan")], [0.0, 1.0], "#000")
    assert "<polyline" not in fig.render()
    assert "-0.00" not in Figure((-1, 0), (-1, 0)).render()


def test_pure_python_fallback_runs_end_to_end():
    import os
    import subprocess
    import sys

    env = dict(os.environ, VISCOEVANS_BACKEND="python")
    out = subprocess.run([sys.executable, "-m", "viscoevans", "selftest"], env=env,
                         capture_output=True, text=True, timeout=600)
    assert out.returncode == 0, out.stderr
    assert "python kernels" in out.stdout
