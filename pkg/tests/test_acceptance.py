"""Acceptance suite: one test per release criterion, each at its pinned
tolerance, printing a PASS/FAIL line as it completes."""

import functools
import json
import math
import struct
import time

import numpy as np
import pytest
from click.testing import CliRunner
from scipy import stats as sstats

from terralens.cli import main as cli_main
from terralens.projections import (MapPoint, hammer_forward, hammer_inverse,
                                   tissot)
from terralens.scenes import (CurvedMap, EgocentricGlobe, ExocentricGlobe,
                              FlatMap, morph)
from terralens.sphere import (GeoCoord, SphericalPolygon, SphericalRotation,
                              destination, great_circle_distance,
                              initial_bearing, geodesic_midpoint,
                              polygon_area, rotate, uniform_sphere_sample,
                              uniform_sphere_vecs)
from terralens.stimuli import (AREA_CONDITIONS, DISTANCE_CONDITIONS,
                               DIRECTION_SEPARATIONS, accuracy_score,
                               build_session, gen_area_task,
                               gen_direction_task, gen_distance_task,
                               latin_square_row, two_value_cv)
from terralens.analytics import friedman
from terralens.sphere import cross_track_distance

SQRT2 = math.sqrt(2.0)


def criterion(name):
    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"ACCEPTANCE FAIL: {name}")
                raise
            print(f"ACCEPTANCE PASS: {name}")
        return wrapper
    return deco


@criterion("hammer equal-area (quad ratios 1e-3, tissot a*b 1e-4, < 5 s)")
def test_hammer_equal_area():
    t0 = time.perf_counter()
    d = 0.05
    ratios = []
    for lon in np.arange(-177.5, 178.0, 5.0):
        for lat in np.arange(-87.5, 88.0, 5.0):
            corners = (GeoCoord(lon - d, lat - d), GeoCoord(lon + d, lat - d),
                       GeoCoord(lon + d, lat + d), GeoCoord(lon - d, lat + d))
            sph = polygon_area(SphericalPolygon(corners))
            pts = [hammer_forward(c) for c in corners]
            plane = 0.5 * abs(sum(pts[i].x * pts[(i + 1) % 4].y
                                  - pts[(i + 1) % 4].x * pts[i].y for i in range(4)))
            ratios.append(plane / sph)
    ratios = np.array(ratios)
    assert float(np.max(np.abs(ratios / np.mean(ratios) - 1.0))) < 1e-3
    for lon in np.arange(-180.0, 181.0, 30.0):
        for lat in np.arange(-60.0, 61.0, 30.0):
            e = tissot(GeoCoord(float(lon), float(lat)))
            assert e.semi_major * e.semi_minor == pytest.approx(1.0, abs=1e-4)
    assert time.perf_counter() - t0 < 5.0


@criterion("projection round-trip (1e4 interior points, max error < 1e-9)")
def test_projection_round_trip():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(10_000):
        t = rng.uniform(0.0, 2.0 * math.pi)
        r = math.sqrt(rng.uniform(0.0, 1.0)) * 0.999
        m = MapPoint(2.0 * SQRT2 * r * math.cos(t), SQRT2 * r * math.sin(t))
        m2 = hammer_forward(hammer_inverse(m))
        worst = max(worst, abs(m2.x - m.x), abs(m2.y - m.y))
    assert worst < 1e-9


@criterion("geometry oracles (octant 1e-12, MC area 0.5%, isometry 1e-9)")
def test_geometry_oracles():
    octant = SphericalPolygon((GeoCoord(0, 0), GeoCoord(90, 0), GeoCoord(0, 90)))
    assert polygon_area(octant) == pytest.approx(math.pi / 2.0, abs=1e-12)

    # Monte-Carlo oracle: area-uniform samples + convex containment, an
    # independent route from the spherical-excess fan.
    centre = GeoCoord(15, -20)
    verts = tuple(destination(centre, -az, 8.0) for az in np.arange(0.0, 360.0, 45.0))
    poly = SphericalPolygon(verts)
    area = polygon_area(poly)
    edges = np.cross(poly.vecs(), np.roll(poly.vecs(), -1, axis=0))
    rng = np.random.default_rng(2718)
    total = 10_000_000
    chunk = 1_000_000
    hits = 0
    for _ in range(total // chunk):
        pts = uniform_sphere_vecs(rng, chunk)
        hits += int(np.sum(np.all(pts @ edges.T >= 0.0, axis=1)))
    mc_area = hits / total * 4.0 * math.pi
    assert abs(area - mc_area) / mc_area < 0.005

    rng = np.random.default_rng(99)
    for _ in range(1000):
        a, b = uniform_sphere_sample(rng), uniform_sphere_sample(rng)
        r = SphericalRotation(rng.uniform(-180, 180), rng.uniform(-90, 90),
                              rng.uniform(-180, 180))
        d0 = great_circle_distance(a, b)
        d1 = great_circle_distance(rotate(r, a), rotate(r, b))
        assert abs(d1 - d0) <= 1e-9


@criterion("scene parameters match the study dimensions")
def test_scene_parameters():
    exo = ExocentricGlobe()
    assert exo.radius == 0.4
    assert exo.center == (0.0, 0.0, -1.0)
    flat = FlatMap()
    assert (flat.width, flat.height) == (1.0, 0.5)
    assert flat.center == (0.0, 0.0, -1.0)
    ego = EgocentricGlobe()
    assert ego.radius == 8.0
    assert math.dist((0.0, 0.0, 0.0), ego.center) == pytest.approx(
        0.8 * ego.radius, abs=1e-12)
    curved = CurvedMap()
    assert curved.radius == 1.0
    assert (curved.h_span, curved.v_span) == (108.0, 54.0)


def _revalidate_distance(task):
    d_ab = great_circle_distance(*task.pair_ab)
    d_xy = great_circle_distance(*task.pair_xy)
    assert 40.0 - 1e-9 <= d_ab <= 60.0 + 1e-9
    assert 40.0 - 1e-9 <= d_xy <= 60.0 + 1e-9
    cv, sep = DISTANCE_CONDITIONS[task.difficulty]
    assert abs(two_value_cv(d_ab, d_xy) - cv) < 1e-6
    got_sep = great_circle_distance(geodesic_midpoint(*task.pair_ab),
                                    geodesic_midpoint(*task.pair_xy))
    assert abs(got_sep - sep) < 1e-6
    assert task.truth == ("ab" if d_ab > d_xy else "xy")


def _revalidate_area(task):
    cv, sep = AREA_CONDITIONS[task.difficulty]
    assert abs(two_value_cv(polygon_area(task.poly_a), polygon_area(task.poly_b))
               - cv) < 1e-6
    assert abs(great_circle_distance(task.centroid_a, task.centroid_b) - sep) < 1e-6
    for centroid, poly, radius in ((task.centroid_a, task.poly_a, 8.0),
                                   (task.centroid_b, task.poly_b, task.radius_b)):
        az = np.array([initial_bearing(centroid, v) for v in poly.vertices])
        gaps = (-np.diff(np.concatenate([az, az[:1]]))) % 360.0
        assert gaps.min() >= 30.0 - 1e-9
        for v in poly.vertices:
            assert abs(great_circle_distance(centroid, v) - radius) < 1e-9


def _revalidate_direction(task):
    xt = cross_track_distance(task.arrow_start, task.arrow_bearing, task.target)
    if task.truth == "hit":
        assert abs(xt) < 1e-9
        assert abs(great_circle_distance(task.arrow_start, task.target)
                   - task.separation) < 1e-6
    else:
        assert abs(abs(xt) - task.miss_offset) < 1e-6


@criterion("stimuli re-validation (1000 per family/difficulty, < 30 s)")
def test_stimuli_revalidation():
    t0 = time.perf_counter()
    n = 1000
    for diff in DISTANCE_CONDITIONS:
        rng = np.random.default_rng([1, hash_stable(diff)])
        for _ in range(n):
            _revalidate_distance(gen_distance_task(diff, rng))
    for diff in AREA_CONDITIONS:
        rng = np.random.default_rng([2, hash_stable(diff)])
        for _ in range(n):
            _revalidate_area(gen_area_task(diff, rng))
    for name, sep in DIRECTION_SEPARATIONS.items():
        rng = np.random.default_rng([3, hash_stable(name)])
        for i in range(n):
            _revalidate_direction(gen_direction_task(sep, "hit" if i % 2 else "miss", rng))
    assert time.perf_counter() - t0 < 30.0


def hash_stable(s: str) -> int:
    return sum(ord(c) for c in s)


@criterion("session builder (108 stimuli, 3/3/3+6/3 structure, latin square)")
def test_session_builder():
    for idx in range(8):
        s = build_session(idx, seed=4)
        assert s.stimulus_count() == 108
        assert [b.family for b in s.blocks] == (["distance"] * 4 + ["area"] * 4
                                                + ["direction"] * 4)
        for b in s.blocks:
            assert len(b.stimuli) == 9
            if b.family == "direction":
                seps = [t.separation for t in b.stimuli]
                assert seps.count(60.0) == 6 and seps.count(120.0) == 3
            else:
                diffs = [t.difficulty for t in b.stimuli]
                assert all(diffs.count(d) == 3 for d in
                           ("easy", "small_variation", "far_distance"))
    rows = [latin_square_row(i) for i in range(4)]
    for col in range(4):
        assert len({rows[r][col] for r in range(4)}) == 4


@criterion("accuracy score fixtures ((9,9)->1, (12,24)->0, (18,24)->0.5)")
def test_accuracy_fixtures():
    assert accuracy_score(9, 9) == 1.0
    assert accuracy_score(12, 24) == 0.0
    assert accuracy_score(18, 24) == 0.5


@criterion("friedman (perfect-agreement chi2=8, scipy oracle 1e-6, bounds)")
def test_friedman():
    chi2, dof, _ = friedman([[1.0, 2.0, 3.0]] * 4)
    assert chi2 == 8.0 and dof == 2

    data = np.array([
        [7.0, 9.9, 8.5, 5.1, 10.3],
        [5.3, 5.7, 4.7, 3.5, 7.7],
        [4.9, 7.6, 5.5, 2.8, 8.4],
        [8.8, 8.9, 8.1, 3.3, 9.1],
    ])
    ref = sstats.friedmanchisquare(*data.T)
    chi2, _, p = friedman(data)
    assert chi2 == pytest.approx(float(ref.statistic), abs=1e-6)
    assert p == pytest.approx(float(ref.pvalue), abs=1e-6)

    rng = np.random.default_rng(8)
    for _ in range(1000):
        n = int(rng.integers(2, 12))
        k = int(rng.integers(2, 8))
        chi2, _, _ = friedman(rng.normal(size=(n, k)))
        assert -1e-12 <= chi2 <= n * (k - 1) + 1e-9


@criterion("morph endpoints bitwise, midpoint componentwise mean")
def test_morph_endpoints():
    rng = np.random.default_rng(3)
    r = SphericalRotation(15.0, -25.0, 40.0)
    flat = FlatMap(rotation=r)
    exo = ExocentricGlobe(rotation=r)
    for _ in range(200):
        g = uniform_sphere_sample(rng)
        m0 = morph(0.0, g, r)
        m1 = morph(1.0, g, r)
        assert struct.pack("<3d", *m0) == struct.pack("<3d", *flat.embed(g))
        assert struct.pack("<3d", *m1) == struct.pack("<3d", *exo.embed(g))
        mid = morph(0.5, g, r)
        for i in range(3):
            assert mid[i] == pytest.approx(0.5 * (m0[i] + m1[i]), abs=1e-15)


@criterion("cli determinism (byte-identical outputs per subcommand)")
def test_cli_determinism(tmp_path):
    runner = CliRunner()
    resp = tmp_path / "responses.csv"
    rows = ["participant,visualisation,task,difficulty,stimulus_id,chosen,correct,response_time"]
    rng = np.random.default_rng(0)
    for p in ("p1", "p2", "p3"):
        for vis in ("exocentric", "flat"):
            for i in range(3):
                rows.append(f"{p},{vis},distance,easy,{vis}{i},ab,{int(rng.random() < 0.7)},9.5")
    resp.write_text("\n".join(rows) + "\n")

    def run_all(tag):
        outs = {}
        d = tmp_path / tag
        d.mkdir()
        specs = {
            "render": ["render", "--rotation", "20,30,5", "--graticule", "30",
                       "--size", "500", "--out", str(d / "map.svg")],
            "generate": ["generate", "area", "--difficulty", "easy", "--count", "2",
                         "--seed", "6", "--out", str(d / "tasks.json")],
            "session": ["session", "--participant", "1", "--seed", "2",
                        "--out", str(d / "session.json")],
            "analyze": ["analyze", str(resp), "--out", str(d / "summary.json")],
            "morph": ["morph", "--steps", "3", "--graticule", "30", "--size", "400",
                      "--out-dir", str(d / "frames")],
            "golden": ["golden", "--seed", "1", "--samples", "100",
                       "--out", str(d / "golden.json")],
        }
        for name, args in specs.items():
            res = runner.invoke(cli_main, args, catch_exceptions=False)
            assert res.exit_code == 0, f"{name} failed: {res.output}"
        outs["render"] = (d / "map.svg").read_bytes()
        outs["generate"] = (d / "tasks.json").read_bytes()
        outs["session"] = (d / "session.json").read_bytes()
        outs["analyze"] = (d / "summary.json").read_bytes()
        outs["morph"] = b"".join(p.read_bytes()
                                 for p in sorted((d / "frames").iterdir()))
        outs["golden"] = (d / "golden.json").read_bytes()
        return outs

    first = run_all("run1")
    second = run_all("run2")
    for name in first:
        assert first[name] == second[name], f"{name} output not byte-stable"
