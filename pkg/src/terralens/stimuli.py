"""Spatial-task stimulus generation, ground truth, and scoring.

Three task families (distance comparison, area comparison, direction
estimation) with the study's difficulty parameters baked in:

* distance pairs span 40-60 degrees; distance CV 10 % / 5 %; midpoints
  60 or 120 degrees apart
* area polygons: 8 vertices, 8 degrees from the generation centre, adjacent
  azimuth gaps >= 30 degrees; area CV 10 % / 7.5 %; centres 60 or 120 apart
* direction arrows: does the continuation hit a target 60 or 120 away?

All generators take an explicit numpy Generator and re-derive nothing from
global state, so batches are reproducible and splittable by seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptySample, GenerationExhausted
from .sphere import (GeoCoord, SphericalPolygon, _local_frame,
                     cross_track_distance, destination, great_circle_distance,
                     initial_bearing, point_in_polygon, polygon_area, to_geo,
                     uniform_sphere_sample)

# (cv, separation_deg) per difficulty condition
DISTANCE_CONDITIONS = {
    "easy": (0.10, 60.0),
    "small_variation": (0.05, 60.0),
    "far_distance": (0.10, 120.0),
}
AREA_CONDITIONS = {
    "easy": (0.10, 60.0),
    "small_variation": (0.075, 60.0),
    "far_distance": (0.10, 120.0),
}
DIRECTION_SEPARATIONS = {"close": 60.0, "far": 120.0}

DISTANCE_RANGE = (40.0, 60.0)
POLYGON_VERTICES = 8
POLYGON_RADIUS = 8.0
MIN_AZIMUTH_GAP = 30.0
DEFAULT_MISS_OFFSET = 15.0
DEFAULT_ARROW_LENGTH = 10.0

_MAX_TRIES = 10_000

VISUALISATIONS = ("exocentric", "flat", "egocentric", "curved")
TASK_FAMILIES = ("distance", "area", "direction")

# Williams design: a 4x4 Latin square balanced for first-order carryover.
_LATIN_4 = ((0, 1, 3, 2), (1, 2, 0, 3), (2, 3, 1, 0), (3, 0, 2, 1))


@dataclass(frozen=True)
class DistanceTask:
    pair_ab: tuple[GeoCoord, GeoCoord]
    pair_xy: tuple[GeoCoord, GeoCoord]
    difficulty: str
    truth: str                 # "ab" | "xy"
    cv: float
    midpoint_separation: float


@dataclass(frozen=True)
class AreaTask:
    poly_a: SphericalPolygon
    poly_b: SphericalPolygon
    centroid_a: GeoCoord
    centroid_b: GeoCoord
    radius_a: float
    radius_b: float
    difficulty: str
    truth: str                 # "a" | "b"
    cv: float
    centroid_separation: float


@dataclass(frozen=True)
class DirectionTask:
    arrow_start: GeoCoord
    arrow_bearing: float
    arrow_length: float
    target: GeoCoord
    separation: float
    truth: str                 # "hit" | "miss"
    miss_offset: float


@dataclass(frozen=True)
class SessionBlock:
    visualisation: str
    family: str
    stimuli: tuple


@dataclass(frozen=True)
class Session:
    participant_index: int
    seed: int
    blocks: tuple[SessionBlock, ...]

    def stimulus_count(self) -> int:
        return sum(len(b.stimuli) for b in self.blocks)


def two_value_cv(a: float, b: float) -> float:
    """Population coefficient of variation of two values: |a-b| / (a+b)."""
    return abs(a - b) / (a + b)


def gen_distance_task(difficulty: str, rng: np.random.Generator) -> DistanceTask:
    """One distance-comparison stimulus for the given difficulty condition.

    The first distance is drawn uniformly in [40, 60]; the second is solved
    from the target CV and rejected when it leaves the range. Each pair is
    laid out symmetrically about its midpoint along a random bearing, and the
    two midpoints sit exactly `separation` apart.
    """
    cv, separation = DISTANCE_CONDITIONS[difficulty]
    lo, hi = DISTANCE_RANGE
    for _ in range(_MAX_TRIES):
        d1 = rng.uniform(lo, hi)
        d2 = d1 * (1.0 - cv) / (1.0 + cv)
        if lo <= d2 <= hi:
            break
    else:
        raise GenerationExhausted("no distance pair satisfies the CV in range")
    m1 = uniform_sphere_sample(rng)
    m2 = destination(m1, rng.uniform(0.0, 360.0), separation)
    ori1 = rng.uniform(0.0, 360.0)
    ori2 = rng.uniform(0.0, 360.0)
    pair1 = (destination(m1, ori1, d1 / 2.0), destination(m1, ori1 + 180.0, d1 / 2.0))
    pair2 = (destination(m2, ori2, d2 / 2.0), destination(m2, ori2 + 180.0, d2 / 2.0))
    if rng.random() < 0.5:
        return DistanceTask(pair1, pair2, difficulty, "ab", cv, separation)
    return DistanceTask(pair2, pair1, difficulty, "xy", cv, separation)


def _polygon_azimuth_gaps(rng: np.random.Generator, n: int = POLYGON_VERTICES) -> np.ndarray:
    """Azimuth gaps >= MIN_AZIMUTH_GAP summing to 360.

    Drawn as min-gap plus a flat Dirichlet split of the slack, which is the
    uniform distribution on the constrained simplex (what rejection sampling
    of a flat Dirichlet converges to, without the rejection loop).
    """
    slack = 360.0 - n * MIN_AZIMUTH_GAP
    return MIN_AZIMUTH_GAP + rng.dirichlet(np.ones(n)) * slack


def _azimuths_from_gaps(start: float, gaps: np.ndarray) -> np.ndarray:
    # Decreasing azimuth order makes the ring counter-clockwise from outside.
    return start - np.concatenate([[0.0], np.cumsum(gaps[:-1])])


def _fan_area(vecs: np.ndarray) -> float:
    v0 = vecs[0]
    b = vecs[1:-1]
    c = vecs[2:]
    triples = np.einsum("i,ji->j", v0, np.cross(b, c))
    denoms = 1.0 + b @ v0 + np.einsum("ij,ij->i", b, c) + c @ v0
    return abs(float(np.sum(2.0 * np.arctan2(triples, denoms))))


def _ring_vecs(cvec: np.ndarray, north: np.ndarray, east: np.ndarray,
               azimuths: np.ndarray, radius: float) -> np.ndarray:
    """(n, 3) vertex vectors `radius` degrees from the centre along azimuths."""
    az = np.radians(azimuths)
    r = math.radians(radius)
    t = np.outer(np.cos(az), north) + np.outer(np.sin(az), east)
    return math.cos(r) * cvec + math.sin(r) * t


def _solve_polygon_radius(cvec, north, east, azimuths: np.ndarray,
                          target_area: float, tol_sr: float = 1e-9) -> float:
    """Vertex radius whose polygon area matches target_area, by bisection."""
    def area_at(r):
        return _fan_area(_ring_vecs(cvec, north, east, azimuths, r))

    lo, hi = 0.5, 60.0
    if not area_at(lo) < target_area < area_at(hi):
        raise GenerationExhausted("target polygon area outside the bracket")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        a = area_at(mid)
        if abs(a - target_area) < tol_sr:
            return mid
        if a < target_area:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _same_background(task_points, land_rings) -> bool:
    flags = {any(point_in_polygon(p, ring) for ring in land_rings)
             for p in task_points}
    return len(flags) == 1


def gen_area_task(difficulty: str, rng: np.random.Generator,
                  land_rings=None) -> AreaTask:
    """One area-comparison stimulus.

    Polygon A has all vertices exactly 8 degrees from its generation centre;
    polygon B shares the construction but its vertex radius is bisected until
    the steradian-area CV matches the condition exactly. When `land_rings`
    (a list of GeoCoord rings) is given, both polygons must sit on the same
    background class (all-land or all-sea), enforced by regeneration.
    """
    cv, separation = AREA_CONDITIONS[difficulty]
    for _ in range(_MAX_TRIES):
        centre_a = uniform_sphere_sample(rng)
        centre_b = destination(centre_a, rng.uniform(0.0, 360.0), separation)
        va, vb = centre_a.to_vec(), centre_b.to_vec()
        frame_a, frame_b = _local_frame(va), _local_frame(vb)
        az_a = _azimuths_from_gaps(rng.uniform(0.0, 360.0), _polygon_azimuth_gaps(rng))
        az_b = _azimuths_from_gaps(rng.uniform(0.0, 360.0), _polygon_azimuth_gaps(rng))
        area_a = _fan_area(_ring_vecs(va, *frame_a, az_a, POLYGON_RADIUS))
        b_is_larger = bool(rng.random() < 0.5)
        ratio = (1.0 + cv) / (1.0 - cv) if b_is_larger else (1.0 - cv) / (1.0 + cv)
        radius_b = _solve_polygon_radius(vb, *frame_b, az_b, area_a * ratio)
        verts_a = tuple(to_geo(v) for v in _ring_vecs(va, *frame_a, az_a, POLYGON_RADIUS))
        verts_b = tuple(to_geo(v) for v in _ring_vecs(vb, *frame_b, az_b, radius_b))
        if land_rings is not None and not _same_background(
                verts_a + verts_b + (centre_a, centre_b), land_rings):
            continue
        return AreaTask(
            SphericalPolygon(verts_a), SphericalPolygon(verts_b),
            centre_a, centre_b, POLYGON_RADIUS, radius_b,
            difficulty, "b" if b_is_larger else "a", cv, separation)
    raise GenerationExhausted("could not satisfy the background constraint")


def gen_direction_task(separation: float, truth: str, rng: np.random.Generator,
                       miss_offset: float = DEFAULT_MISS_OFFSET,
                       arrow_length: float = DEFAULT_ARROW_LENGTH) -> DirectionTask:
    """One direction-estimation stimulus.

    Hit: the target lies exactly on the arrow's great circle, `separation`
    degrees from the start. Miss: the hit point is displaced perpendicular
    to the path by `miss_offset` degrees (side chosen at random).
    """
    if truth not in ("hit", "miss"):
        raise ValueError(f"truth must be 'hit' or 'miss', got {truth!r}")
    start = uniform_sphere_sample(rng)
    bearing = rng.uniform(0.0, 360.0)
    on_path = destination(start, bearing, separation)
    if truth == "hit":
        return DirectionTask(start, bearing, arrow_length, on_path,
                             separation, "hit", 0.0)
    forward = (initial_bearing(on_path, start) + 180.0) % 360.0
    side = 90.0 if rng.random() < 0.5 else -90.0
    target = destination(on_path, forward + side, miss_offset)
    return DirectionTask(start, bearing, arrow_length, target,
                         separation, "miss", miss_offset)


HIT_THRESHOLD = 1e-6


def oracle_answer(task) -> str:
    """Ground-truth answer recomputed from the emitted geometry alone."""
    if isinstance(task, DistanceTask):
        d_ab = great_circle_distance(*task.pair_ab)
        d_xy = great_circle_distance(*task.pair_xy)
        return "ab" if d_ab > d_xy else "xy"
    if isinstance(task, AreaTask):
        return "a" if polygon_area(task.poly_a) > polygon_area(task.poly_b) else "b"
    if isinstance(task, DirectionTask):
        xt = cross_track_distance(task.arrow_start, task.arrow_bearing, task.target)
        return "hit" if abs(xt) < HIT_THRESHOLD else "miss"
    raise TypeError(f"not a task: {task!r}")


def accuracy_score(correct: int, total: int) -> float:
    """Chance-corrected accuracy: 0 at coin-flip level, 1 for all correct."""
    if total <= 0:
        raise EmptySample("no responses to score")
    if not 0 <= correct <= total:
        raise ValueError(f"{correct} correct of {total}")
    return (correct / total - 0.5) / 0.5


def latin_square_row(participant_index: int) -> tuple[str, ...]:
    row = _LATIN_4[participant_index % 4]
    return tuple(VISUALISATIONS[i] for i in row)


def build_session(participant_index: int, seed: int) -> Session:
    """Full stimulus schedule for one participant: fixed task order
    (distance, area, direction), Latin-square visualisation order, and the
    study's repetition structure (3/3/3, 3/3/3, 6 close + 3 far) for a total
    of 108 stimuli. Deterministic in (participant_index, seed)."""
    if participant_index < 0:
        raise ValueError("participant_index must be >= 0")
    rng = np.random.default_rng([seed, participant_index])
    vis_order = latin_square_row(participant_index)
    blocks = []
    for family in TASK_FAMILIES:
        for vis in vis_order:
            stimuli = []
            if family in ("distance", "area"):
                conditions = [d for d in ("easy", "small_variation", "far_distance")
                              for _ in range(3)]
                gen = gen_distance_task if family == "distance" else gen_area_task
                for diff in (conditions[i] for i in rng.permutation(len(conditions))):
                    stimuli.append(gen(diff, rng))
            else:
                conditions = ["close"] * 6 + ["far"] * 3
                for diff in (conditions[i] for i in rng.permutation(len(conditions))):
                    truth = "hit" if rng.random() < 0.5 else "miss"
                    stimuli.append(gen_direction_task(
                        DIRECTION_SEPARATIONS[diff], truth, rng))
            blocks.append(SessionBlock(vis, family, tuple(stimuli)))
    return Session(participant_index, seed, tuple(blocks))


def direction_difficulty(task: DirectionTask) -> str:
    return "close" if task.separation <= 90.0 else "far"


# ---------------------------------------------------------------------------
# JSON payloads
# ---------------------------------------------------------------------------

def _geo_json(g: GeoCoord) -> list[float]:
    return [g.lon, g.lat]


def task_to_dict(task) -> dict:
    if isinstance(task, DistanceTask):
        return {
            "family": "distance",
            "difficulty": task.difficulty,
            "truth": task.truth,
            "cv": task.cv,
            "separation": task.midpoint_separation,
            "payload": {
                "pair_ab": [_geo_json(g) for g in task.pair_ab],
                "pair_xy": [_geo_json(g) for g in task.pair_xy],
            },
        }
    if isinstance(task, AreaTask):
        return {
            "family": "area",
            "difficulty": task.difficulty,
            "truth": task.truth,
            "cv": task.cv,
            "separation": task.centroid_separation,
            "payload": {
                "poly_a": [_geo_json(g) for g in task.poly_a.vertices],
                "poly_b": [_geo_json(g) for g in task.poly_b.vertices],
                "centroid_a": _geo_json(task.centroid_a),
                "centroid_b": _geo_json(task.centroid_b),
                "radius_a": task.radius_a,
                "radius_b": task.radius_b,
            },
        }
    if isinstance(task, DirectionTask):
        return {
            "family": "direction",
            "difficulty": direction_difficulty(task),
            "truth": task.truth,
            "cv": None,
            "separation": task.separation,
            "payload": {
                "arrow_start": _geo_json(task.arrow_start),
                "arrow_bearing": task.arrow_bearing,
                "arrow_length": task.arrow_length,
                "target": _geo_json(task.target),
                "miss_offset": task.miss_offset,
            },
        }
    raise TypeError(f"not a task: {task!r}")


def session_to_dict(session: Session) -> dict:
    entries = []
    idx = 0
    for block in session.blocks:
        for task in block.stimuli:
            d = task_to_dict(task)
            d["stimulus_id"] = idx
            d["visualisation"] = block.visualisation
            entries.append(d)
            idx += 1
    return {
        "participant_index": session.participant_index,
        "seed": session.seed,
        "visualisation_order": list(latin_square_row(session.participant_index)),
        "stimuli": entries,
    }
