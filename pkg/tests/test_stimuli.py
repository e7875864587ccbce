import math

import numpy as np
import pytest

from terralens.errors import EmptySample
from terralens.sphere import (GeoCoord, cross_track_distance, destination,
                              geodesic_midpoint, great_circle_distance,
                              initial_bearing, polygon_area)
from terralens.stimuli import (AREA_CONDITIONS, DISTANCE_CONDITIONS,
                               DIRECTION_SEPARATIONS, AreaTask, DistanceTask,
                               DirectionTask, accuracy_score, build_session,
                               gen_area_task, gen_direction_task,
                               gen_distance_task, latin_square_row,
                               oracle_answer, session_to_dict, task_to_dict,
                               two_value_cv)


def recomputed_distance_cv(task: DistanceTask) -> float:
    return two_value_cv(great_circle_distance(*task.pair_ab),
                        great_circle_distance(*task.pair_xy))


def recomputed_midpoint_separation(task: DistanceTask) -> float:
    return great_circle_distance(geodesic_midpoint(*task.pair_ab),
                                 geodesic_midpoint(*task.pair_xy))


def vertex_azimuth_gaps(centroid, polygon) -> np.ndarray:
    az = np.array([initial_bearing(centroid, v) for v in polygon.vertices])
    gaps = (-np.diff(np.concatenate([az, az[:1]]))) % 360.0
    return gaps


class TestDistanceTask:
    def test_easy_seed_42(self):
        t = gen_distance_task("easy", np.random.default_rng(42))
        assert recomputed_distance_cv(t) == pytest.approx(0.10, abs=1e-9)
        assert recomputed_midpoint_separation(t) == pytest.approx(60.0, abs=1e-6)

    def test_small_variation_cv(self):
        for seed in range(10):
            t = gen_distance_task("small_variation", np.random.default_rng(seed))
            assert recomputed_distance_cv(t) == pytest.approx(0.05, abs=1e-9)

    def test_far_distance_separation(self):
        for seed in range(10):
            t = gen_distance_task("far_distance", np.random.default_rng(seed))
            assert recomputed_midpoint_separation(t) == pytest.approx(120.0, abs=1e-6)

    def test_distances_in_range(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            for diff in DISTANCE_CONDITIONS:
                t = gen_distance_task(diff, rng)
                for pair in (t.pair_ab, t.pair_xy):
                    assert 40.0 - 1e-9 <= great_circle_distance(*pair) <= 60.0 + 1e-9

    def test_truth_matches_oracle(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            t = gen_distance_task("easy", rng)
            assert oracle_answer(t) == t.truth

    def test_longer_pair_is_randomized(self):
        rng = np.random.default_rng(8)
        truths = {gen_distance_task("easy", rng).truth for _ in range(40)}
        assert truths == {"ab", "xy"}


class TestAreaTask:
    def test_cv_exact(self):
        rng = np.random.default_rng(7)
        for diff, (cv, _) in AREA_CONDITIONS.items():
            for _ in range(5):
                t = gen_area_task(diff, rng)
                got = two_value_cv(polygon_area(t.poly_a), polygon_area(t.poly_b))
                assert got == pytest.approx(cv, abs=1e-6)

    def test_centroid_separation(self):
        rng = np.random.default_rng(9)
        for diff, (_, sep) in AREA_CONDITIONS.items():
            t = gen_area_task(diff, rng)
            assert great_circle_distance(t.centroid_a, t.centroid_b) == pytest.approx(sep, abs=1e-6)

    def test_polygon_a_radius_exact(self):
        rng = np.random.default_rng(11)
        t = gen_area_task("easy", rng)
        for v in t.poly_a.vertices:
            assert great_circle_distance(t.centroid_a, v) == pytest.approx(8.0, abs=1e-9)

    def test_polygon_b_radius_uniform_and_recorded(self):
        rng = np.random.default_rng(13)
        t = gen_area_task("easy", rng)
        radii = [great_circle_distance(t.centroid_b, v) for v in t.poly_b.vertices]
        assert max(radii) - min(radii) < 1e-9
        assert radii[0] == pytest.approx(t.radius_b, abs=1e-9)
        assert 5.0 < t.radius_b < 12.0

    def test_min_azimuth_gap(self):
        rng = np.random.default_rng(15)
        for _ in range(10):
            t = gen_area_task("small_variation", rng)
            for centroid, poly in ((t.centroid_a, t.poly_a), (t.centroid_b, t.poly_b)):
                gaps = vertex_azimuth_gaps(centroid, poly)
                assert gaps.min() >= 30.0 - 1e-9
                assert gaps.sum() == pytest.approx(360.0, abs=1e-9)

    def test_polygons_convex(self):
        rng = np.random.default_rng(17)
        for _ in range(10):
            t = gen_area_task("easy", rng)
            for poly in (t.poly_a, t.poly_b):
                vecs = poly.vecs()
                edges = np.cross(vecs, np.roll(vecs, -1, axis=0))
                # Every vertex on or left of every directed edge plane.
                assert float(np.min(vecs @ edges.T)) > -1e-12

    def test_truth_matches_oracle(self):
        rng = np.random.default_rng(19)
        for _ in range(20):
            t = gen_area_task("far_distance", rng)
            assert oracle_answer(t) == t.truth

    def test_land_sea_constraint(self):
        # A single cap "continent": both polygons must land inside or outside.
        cap_centre = GeoCoord(0, 0)
        ring = [destination(cap_centre, -az, 70.0) for az in np.arange(0, 360, 10)]
        rng = np.random.default_rng(21)
        for _ in range(5):
            t = gen_area_task("easy", rng, land_rings=[ring])
            from terralens.sphere import point_in_polygon
            flags = {point_in_polygon(v, ring)
                     for v in t.poly_a.vertices + t.poly_b.vertices}
            assert len(flags) == 1


class TestDirectionTask:
    def test_hit_equator_quarter(self):
        rng = np.random.default_rng(0)
        t = gen_direction_task(90.0, "hit", rng)
        assert great_circle_distance(t.arrow_start, t.target) == pytest.approx(90.0, abs=1e-6)
        assert abs(cross_track_distance(t.arrow_start, t.arrow_bearing, t.target)) < 1e-9

    def test_miss_offset(self):
        rng = np.random.default_rng(1)
        for sep in DIRECTION_SEPARATIONS.values():
            for _ in range(20):
                t = gen_direction_task(sep, "miss", rng)
                xt = cross_track_distance(t.arrow_start, t.arrow_bearing, t.target)
                assert abs(xt) == pytest.approx(15.0, abs=1e-6)

    def test_custom_miss_offset(self):
        t = gen_direction_task(60.0, "miss", np.random.default_rng(2), miss_offset=5.0)
        xt = cross_track_distance(t.arrow_start, t.arrow_bearing, t.target)
        assert abs(xt) == pytest.approx(5.0, abs=1e-6)

    def test_hit_distance_matches_separation(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            t = gen_direction_task(120.0, "hit", rng)
            assert great_circle_distance(t.arrow_start, t.target) == pytest.approx(120.0, abs=1e-6)

    def test_oracle(self):
        rng = np.random.default_rng(4)
        for truth in ("hit", "miss"):
            t = gen_direction_task(60.0, truth, rng)
            assert oracle_answer(t) == truth


class TestAccuracyScore:
    def test_perfect(self):
        assert accuracy_score(9, 9) == 1.0

    def test_chance(self):
        assert accuracy_score(12, 24) == 0.0

    def test_three_quarters(self):
        assert accuracy_score(18, 24) == 0.5

    def test_empty_raises(self):
        with pytest.raises(EmptySample):
            accuracy_score(0, 0)


class TestSession:
    def test_108_stimuli(self):
        s = build_session(0, 99)
        assert s.stimulus_count() == 108

    def test_block_structure(self):
        s = build_session(2, 7)
        assert len(s.blocks) == 12
        families = [b.family for b in s.blocks]
        assert families == ["distance"] * 4 + ["area"] * 4 + ["direction"] * 4
        for b in s.blocks:
            assert len(b.stimuli) == 9

    def test_repetition_counts(self):
        s = build_session(1, 5)
        for b in s.blocks:
            if b.family == "direction":
                seps = [t.separation for t in b.stimuli]
                assert seps.count(60.0) == 6
                assert seps.count(120.0) == 3
            else:
                diffs = [t.difficulty for t in b.stimuli]
                for d in ("easy", "small_variation", "far_distance"):
                    assert diffs.count(d) == 3

    def test_latin_square(self):
        rows = [latin_square_row(i) for i in range(4)]
        for r in rows:
            assert sorted(r) == sorted(("exocentric", "flat", "egocentric", "curved"))
        for col in range(4):
            assert len({rows[r][col] for r in range(4)}) == 4
        assert latin_square_row(5) == latin_square_row(1)

    def test_deterministic(self):
        assert build_session(3, 11) == build_session(3, 11)
        assert build_session(3, 11) != build_session(3, 12)

    def test_session_to_dict(self):
        d = session_to_dict(build_session(0, 1))
        assert len(d["stimuli"]) == 108
        assert d["stimuli"][0]["stimulus_id"] == 0
        assert {e["family"] for e in d["stimuli"]} == {"distance", "area", "direction"}


class TestSerialization:
    def test_distance_payload(self):
        t = gen_distance_task("easy", np.random.default_rng(0))
        d = task_to_dict(t)
        assert d["family"] == "distance"
        assert d["cv"] == 0.10
        assert len(d["payload"]["pair_ab"]) == 2

    def test_area_payload(self):
        t = gen_area_task("far_distance", np.random.default_rng(0))
        d = task_to_dict(t)
        assert d["separation"] == 120.0
        assert len(d["payload"]["poly_a"]) == 8

    def test_direction_payload(self):
        t = gen_direction_task(60.0, "miss", np.random.default_rng(0))
        d = task_to_dict(t)
        assert d["difficulty"] == "close"
        assert d["payload"]["miss_offset"] == 15.0
