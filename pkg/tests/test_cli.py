import json
import math
import re
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from terralens.cli import main
from terralens.sphere import (GeoCoord, cross_track_distance,
                              geodesic_midpoint, great_circle_distance)
from terralens.stimuli import two_value_cv

try:
    import jsonschema
except ImportError:  # pragma: no cover
    jsonschema = None

SCHEMA_DIR = Path(__file__).resolve().parents[1] / "src" / "terralens" / "schemas"


def run_cli(args):
    res = CliRunner().invoke(main, args, catch_exceptions=False)
    return res


def path_coords(svg: str, cls: str):
    """All vertex coordinate pairs of class-`cls` path elements."""
    out = []
    for m in re.finditer(rf'<path class="{cls}"[^>]* d="([^"]+)"/>', svg):
        out.append([tuple(map(float, tok.split(",")))
                    for tok in re.findall(r"[ML]([-\d.]+,[-\d.]+)", m.group(1))])
    return out


def validate(doc, schema_name):
    if jsonschema is None:
        pytest.skip("jsonschema unavailable")
    schema = json.loads((SCHEMA_DIR / schema_name).read_text())
    jsonschema.validate(doc, schema)


class TestRender:
    def test_graticule_counts(self, tmp_path):
        out = tmp_path / "map.svg"
        res = run_cli(["render", "--out", str(out)])
        assert res.exit_code == 0
        svg = out.read_text()
        assert svg.count('class="meridian"') == 36
        assert svg.count('class="parallel"') + svg.count('class="equator"') == 17
        assert svg.count('class="equator"') == 1

    def test_rotated_pole_centre_tissot_round(self, tmp_path):
        out = tmp_path / "map.svg"
        run_cli(["render", "--rotation", "0,90,0", "--out", str(out)])
        svg = out.read_text()
        w = float(re.search(r'width="(\d+)"', svg).group(1))
        h = float(re.search(r'height="(\d+)"', svg).group(1))
        best, best_d = None, 1e9
        for m in re.finditer(r'<ellipse class="tissot"[^>]*cx="([-\d.]+)" cy="([-\d.]+)" '
                             r'rx="([-\d.]+)" ry="([-\d.]+)"', svg):
            cx, cy, rx, ry = map(float, m.groups())
            d = math.hypot(cx - w / 2.0, cy - h / 2.0)
            if d < best_d:
                best, best_d = (rx, ry), d
        assert best is not None and best_d < 1.0
        rx, ry = best
        assert rx == pytest.approx(ry, rel=1e-3)

    def test_deterministic_across_processes(self, tmp_path):
        outs = []
        for i, hashseed in enumerate(("1", "2")):
            out = tmp_path / f"m{i}.svg"
            env = {"PYTHONHASHSEED": hashseed, "PATH": "/usr/bin:/bin"}
            subprocess.run([sys.executable, "-m", "terralens.cli", "render",
                            "--rotation", "30,45,10", "--out", str(out)],
                           check=True, env=env, cwd="/root/pkg")
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_malformed_geojson_exit_2(self, tmp_path):
        bad = tmp_path / "bad.geojson"
        bad.write_text("{not json")
        res = CliRunner().invoke(main, ["render", "--coastlines", str(bad),
                                        "--out", str(tmp_path / "m.svg")])
        assert res.exit_code == 2

    def test_unwritable_output_exit_3(self, tmp_path):
        res = CliRunner().invoke(
            main, ["render", "--out", str(tmp_path / "nodir" / "deep" / "m.svg")])
        assert res.exit_code == 3

    def test_coastlines_rendered(self, tmp_path):
        gj = {"type": "FeatureCollection", "features": [
            {"type": "Feature", "geometry": {
                "type": "Polygon",
                "coordinates": [[[150, -20], [-150, -20], [-150, 25], [150, 25], [150, -20]]]},
             "properties": {}},
            {"type": "Feature", "geometry": {
                "type": "LineString", "coordinates": [[0, 0], [40, 20]]},
             "properties": {}},
        ]}
        src = tmp_path / "coast.geojson"
        src.write_text(json.dumps(gj))
        out = tmp_path / "map.svg"
        run_cli(["render", "--coastlines", str(src), "--out", str(out)])
        svg = out.read_text()
        # The polygon straddles the antimeridian: cut into 2 pieces + the line.
        assert svg.count('class="coastline"') == 3

    def test_png_output(self, tmp_path):
        out = tmp_path / "map.png"
        res = run_cli(["render", "--format", "png", "--size", "400",
                       "--graticule", "30", "--out", str(out)])
        assert res.exit_code == 0
        assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"

    def test_curved_preview(self, tmp_path):
        out = tmp_path / "curved.svg"
        res = run_cli(["render", "--projection", "curved-preview", "--out", str(out)])
        assert res.exit_code == 0
        assert out.read_text().count('class="meridian"') == 36


class TestGenerate:
    def test_distance_revalidation(self, tmp_path):
        out = tmp_path / "d.json"
        run_cli(["generate", "distance", "--difficulty", "easy", "--count", "3",
                 "--seed", "7", "--out", str(out)])
        doc = json.loads(out.read_text())
        validate(doc, "stimuli.schema.json")
        assert len(doc["tasks"]) == 3
        for t in doc["tasks"]:
            ab = [GeoCoord(*g) for g in t["payload"]["pair_ab"]]
            xy = [GeoCoord(*g) for g in t["payload"]["pair_xy"]]
            d_ab, d_xy = great_circle_distance(*ab), great_circle_distance(*xy)
            assert two_value_cv(d_ab, d_xy) == pytest.approx(t["cv"], abs=1e-9)
            sep = great_circle_distance(geodesic_midpoint(*ab), geodesic_midpoint(*xy))
            assert sep == pytest.approx(t["separation"], abs=1e-6)
            assert t["truth"] == ("ab" if d_ab > d_xy else "xy")

    def test_direction_revalidation(self, tmp_path):
        out = tmp_path / "dir.json"
        run_cli(["generate", "direction", "--difficulty", "far", "--count", "5",
                 "--seed", "3", "--out", str(out)])
        doc = json.loads(out.read_text())
        validate(doc, "stimuli.schema.json")
        for t in doc["tasks"]:
            p = t["payload"]
            xt = cross_track_distance(GeoCoord(*p["arrow_start"]), p["arrow_bearing"],
                                      GeoCoord(*p["target"]))
            if t["truth"] == "hit":
                assert abs(xt) < 1e-9
            else:
                assert abs(xt) == pytest.approx(p["miss_offset"], abs=1e-6)

    def test_session_108_entries(self, tmp_path):
        out = tmp_path / "s.json"
        run_cli(["generate", "session", "--participant", "0", "--seed", "1",
                 "--out", str(out)])
        doc = json.loads(out.read_text())
        validate(doc, "session.schema.json")
        assert len(doc["stimuli"]) == 108

    def test_same_flags_identical_bytes(self, tmp_path):
        outs = []
        for i in range(2):
            out = tmp_path / f"g{i}.json"
            run_cli(["generate", "area", "--difficulty", "small_variation",
                     "--count", "2", "--seed", "11", "--out", str(out)])
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_bad_difficulty_rejected(self):
        res = CliRunner().invoke(main, ["generate", "direction", "--difficulty", "easy"])
        assert res.exit_code != 0

    def test_seed_env_fallback(self, tmp_path):
        res1 = CliRunner().invoke(main, ["generate", "distance"], env={"TERRALENS_SEED": "55"})
        res2 = CliRunner().invoke(main, ["generate", "distance", "--seed", "55"])
        assert res1.output == res2.output


def write_fixture_responses(path, all_correct=False):
    rows = ["participant,visualisation,task,difficulty,stimulus_id,chosen,correct,response_time"]
    rng = np.random.default_rng(0)
    for p in ("p1", "p2", "p3", "p4"):
        for vis in ("exocentric", "flat", "egocentric", "curved"):
            for i in range(4):
                correct = True if all_correct else bool(rng.random() < 0.7)
                rows.append(f"{p},{vis},distance,easy,{vis}-s{i},ab,{int(correct)},10.0")
    path.write_text("\n".join(rows) + "\n")


class TestAnalyze:
    def test_all_correct_accuracy_one(self, tmp_path):
        resp = tmp_path / "responses.csv"
        write_fixture_responses(resp, all_correct=True)
        out = tmp_path / "summary.json"
        res = run_cli(["analyze", str(resp), "--out", str(out)])
        assert res.exit_code == 0
        doc = json.loads(out.read_text())
        validate(doc, "summary.schema.json")
        assert all(c["accuracy"]["mean"] == 1.0 for c in doc["cells"])

    def test_hand_computed_friedman(self, tmp_path):
        # Per-participant accuracy identical rankings across 4 visualisations:
        # perfect agreement, n=4, k=4 -> chi2 = 12.
        rows = ["participant,visualisation,task,difficulty,stimulus_id,chosen,correct,response_time"]
        counts = {"exocentric": 4, "flat": 3, "egocentric": 2, "curved": 1}
        for p in ("p1", "p2", "p3", "p4"):
            for vis, ncorrect in counts.items():
                for i in range(4):
                    rows.append(f"{p},{vis},distance,easy,s{i},ab,{int(i < ncorrect)},5.0")
        resp = tmp_path / "responses.csv"
        resp.write_text("\n".join(rows) + "\n")
        out = tmp_path / "summary.json"
        run_cli(["analyze", str(resp), "--out", str(out)])
        doc = json.loads(out.read_text())
        assert doc["friedman"]["distance"]["chi2"] == pytest.approx(12.0, abs=1e-9)
        assert doc["friedman"]["distance"]["dof"] == 3

    def test_empty_logs_dir_graceful(self, tmp_path):
        resp = tmp_path / "responses.csv"
        write_fixture_responses(resp)
        logs = tmp_path / "logs"
        logs.mkdir()
        out = tmp_path / "summary.json"
        res = run_cli(["analyze", str(resp), "--logs", str(logs), "--out", str(out)])
        assert res.exit_code == 0
        doc = json.loads(out.read_text())
        assert all(c["interaction"] is None for c in doc["cells"])

    def test_logs_aggregated(self, tmp_path):
        from terralens.analytics import PoseSample, write_pose_log
        resp = tmp_path / "responses.csv"
        write_fixture_responses(resp, all_correct=True)
        logs = tmp_path / "logs"
        logs.mkdir()
        q = (1.0, 0.0, 0.0, 0.0)
        write_pose_log(logs / "p1__flat-s0.csv", [
            PoseSample(0.0, (0, 0, 0), q, (0, 0, 0), q),
            PoseSample(0.1, (2, 0, 0), q, (0, 0, 0), q)])
        out = tmp_path / "summary.json"
        run_cli(["analyze", str(resp), "--logs", str(logs), "--out", str(out)])
        doc = json.loads(out.read_text())
        with_logs = [c for c in doc["cells"] if c["interaction"]]
        assert len(with_logs) == 1
        assert with_logs[0]["interaction"]["head_move_m"] == pytest.approx(2.0)

    def test_malformed_csv_exit_2(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("this,is,not\nthe,right,format\n")
        res = CliRunner().invoke(main, ["analyze", str(bad)])
        assert res.exit_code == 2

    def test_table_printed(self, tmp_path):
        resp = tmp_path / "responses.csv"
        write_fixture_responses(resp)
        res = run_cli(["analyze", str(resp)])
        assert "visualisation" in res.output
        assert "friedman[distance]" in res.output


class TestMorph:
    def test_steps_2_endpoints_only(self, tmp_path):
        out = tmp_path / "frames"
        run_cli(["morph", "--steps", "2", "--out-dir", str(out), "--graticule", "30"])
        assert sorted(p.name for p in out.iterdir()) == ["frame_000.svg", "frame_001.svg"]

    def test_frame0_matches_flat_render_geometry(self, tmp_path):
        run_cli(["morph", "--steps", "3", "--out-dir", str(tmp_path / "f"),
                 "--graticule", "30"])
        run_cli(["render", "--graticule", "30", "--tissot", "0",
                 "--out", str(tmp_path / "flat.svg")])
        frame0 = (tmp_path / "f" / "frame_000.svg").read_text()
        flat = (tmp_path / "flat.svg").read_text()
        for cls in ("meridian", "parallel", "equator"):
            assert path_coords(frame0, cls) == path_coords(flat, cls)

    def test_midframe_is_componentwise_midpoint(self, tmp_path):
        run_cli(["morph", "--steps", "3", "--out-dir", str(tmp_path / "f"),
                 "--graticule", "30"])
        f0 = path_coords((tmp_path / "f" / "frame_000.svg").read_text(), "equator")
        f1 = path_coords((tmp_path / "f" / "frame_001.svg").read_text(), "equator")
        f2 = path_coords((tmp_path / "f" / "frame_002.svg").read_text(), "equator")
        for seg0, seg1, seg2 in zip(f0, f1, f2):
            for (x0, y0), (x1, y1), (x2, y2) in zip(seg0, seg1, seg2):
                assert x1 == pytest.approx((x0 + x2) / 2.0, abs=2e-3)
                assert y1 == pytest.approx((y0 + y2) / 2.0, abs=2e-3)

    def test_morph_deterministic(self, tmp_path):
        outs = []
        for i in range(2):
            d = tmp_path / f"f{i}"
            run_cli(["morph", "--steps", "4", "--out-dir", str(d),
                     "--rotation", "10,20,5", "--graticule", "30"])
            outs.append(b"".join(sorted(p.read_bytes() for p in d.iterdir())))
        assert outs[0] == outs[1]


class TestGolden:
    def test_schema_and_values(self, tmp_path):
        out = tmp_path / "golden.json"
        run_cli(["golden", "--seed", "5", "--out", str(out)])
        doc = json.loads(out.read_text())
        validate(doc, "golden.schema.json")
        assert len(doc["scenes"]) == 8
        from terralens.scenes import SCENE_KINDS
        from terralens.sphere import SphericalRotation
        for entry in doc["scenes"]:
            scene = SCENE_KINDS[entry["scene"]["kind"]](
                rotation=SphericalRotation(*entry["scene"]["rotation"]))
            for s in entry["samples"][:10]:
                w = scene.embed(GeoCoord(*s["geo"]))
                assert np.allclose(list(w), s["world"], atol=1e-12)

    def test_deterministic(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        run_cli(["golden", "--seed", "9", "--out", str(a)])
        run_cli(["golden", "--seed", "9", "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()
