"""Hammer equal-area projection, path preparation, and distortion analysis.

The projection works in dimensionless plane units: the full sphere fills the
2:1 ellipse x^2/8 + y^2/2 <= 1 (x in [-2*sqrt(2), 2*sqrt(2)], y in
[-sqrt(2), sqrt(2)]). Geometry is rotated, cut at the antimeridian and
resampled in spherical space before it ever touches the plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import NearPole, OutsideProjection
from .sphere import GeoCoord, SphericalRotation, to_geo

HAMMER_HALF_WIDTH = 2.0 * math.sqrt(2.0)
HAMMER_HALF_HEIGHT = math.sqrt(2.0)

CURVED_H_SPAN = 108.0  # degrees subtended horizontally by the curved map
CURVED_V_SPAN = 54.0


class MapPoint(NamedTuple):
    """Point in Hammer plane units."""

    x: float
    y: float


class TissotEllipse(NamedTuple):
    """Local distortion ellipse: unit circle image under the projection."""

    center: GeoCoord
    semi_major: float
    semi_minor: float
    orientation_deg: float


@dataclass(frozen=True)
class GeoPath:
    """Polyline set on the sphere. `closed` marks every segment as a ring
    whose last->first edge is implied."""

    segments: tuple[tuple[GeoCoord, ...], ...]
    closed: bool = False

    @staticmethod
    def line(points) -> "GeoPath":
        return GeoPath((tuple(points),), closed=False)

    @staticmethod
    def ring(points) -> "GeoPath":
        return GeoPath((tuple(points),), closed=True)


def _hammer_xy(lon_deg: float, lat_deg: float) -> tuple[float, float]:
    # Raw formula; accepts longitudes beyond +-180 so finite differences
    # stay smooth across the map boundary.
    lam = math.radians(lon_deg)
    phi = math.radians(lat_deg)
    cphi = math.cos(phi)
    chl = math.cos(lam / 2.0)
    d = math.sqrt(1.0 + cphi * chl)
    return (
        2.0 * math.sqrt(2.0) * cphi * math.sin(lam / 2.0) / d,
        math.sqrt(2.0) * math.sin(phi) / d,
    )


def hammer_forward(g: GeoCoord) -> MapPoint:
    """Project a point with the Hammer equal-area projection."""
    return MapPoint(*_hammer_xy(g.lon, g.lat))


def in_hammer_ellipse(x: float, y: float, tol: float = 1e-9) -> bool:
    return x * x / 8.0 + y * y / 2.0 <= 1.0 + tol


def hammer_inverse(m: MapPoint) -> GeoCoord:
    """Closed-form inverse of hammer_forward.

    Raises OutsideProjection for points beyond the ellipse boundary (with a
    1e-9 numerical allowance).
    """
    x, y = m
    if not in_hammer_ellipse(x, y):
        raise OutsideProjection(f"({x}, {y}) outside the Hammer ellipse")
    z2 = 1.0 - x * x / 16.0 - y * y / 4.0
    z = math.sqrt(max(z2, 0.0))
    lat = math.degrees(math.asin(min(1.0, max(-1.0, z * y))))
    lon = math.degrees(2.0 * math.atan2(z * x, 2.0 * (2.0 * z2 - 1.0)))
    return GeoCoord(min(180.0, max(-180.0, lon)), lat)


def tissot(g: GeoCoord, h: float = 1e-4) -> TissotEllipse:
    """Distortion ellipse of the Hammer projection at a point.

    Semi-axes are the singular values of the projection's local Jacobian
    against an orthonormal surface frame (so an undistorted point yields the
    unit circle and equal-area behaviour means semi_major*semi_minor == 1).
    Computed by central differences with step `h` degrees.
    """
    if abs(g.lat) >= 89.0:
        raise NearPole(f"indicatrix undefined at lat {g.lat}")
    hr = math.radians(h)
    cphi = math.cos(math.radians(g.lat))
    xe1, ye1 = _hammer_xy(g.lon + h, g.lat)
    xe0, ye0 = _hammer_xy(g.lon - h, g.lat)
    xn1, yn1 = _hammer_xy(g.lon, g.lat + h)
    xn0, yn0 = _hammer_xy(g.lon, g.lat - h)
    # Columns: derivative along local east (unit ground distance) and north.
    jac = np.array([
        [(xe1 - xe0) / (2.0 * hr * cphi), (xn1 - xn0) / (2.0 * hr)],
        [(ye1 - ye0) / (2.0 * hr * cphi), (yn1 - yn0) / (2.0 * hr)],
    ])
    u, s, _ = np.linalg.svd(jac)
    orient = math.degrees(math.atan2(float(u[1, 0]), float(u[0, 0]))) % 180.0
    return TissotEllipse(g, float(s[0]), float(s[1]), orient)


def curved_remap(m: MapPoint) -> tuple[float, float]:
    """Map a Hammer plane point linearly onto the curved-map angle box
    (+-54 degrees horizontally, +-27 vertically)."""
    if not in_hammer_ellipse(m.x, m.y):
        raise OutsideProjection(f"({m.x}, {m.y}) outside the Hammer ellipse")
    return (
        m.x / HAMMER_HALF_WIDTH * (CURVED_H_SPAN / 2.0),
        m.y / HAMMER_HALF_HEIGHT * (CURVED_V_SPAN / 2.0),
    )


# ---------------------------------------------------------------------------
# Rotation / cutting / resampling pipeline
# ---------------------------------------------------------------------------

_Y_AXIS = np.array([0.0, 1.0, 0.0])
_PLANE_EPS = 1e-14


def _unit(v: np.ndarray) -> np.ndarray:
    n = float(np.linalg.norm(v))
    if n < 1e-12:
        raise ValueError("cannot interpolate between antipodal points")
    return v / n


def _arc_angle(v0: np.ndarray, v1: np.ndarray) -> float:
    return math.atan2(float(np.linalg.norm(np.cross(v0, v1))), float(np.dot(v0, v1)))


def _antimeridian_crossing(v0: np.ndarray, v1: np.ndarray):
    """Intersection of the minor arc v0->v1 with the antimeridian half-plane,
    or None. Endpoints sitting on the plane never generate a mid-edge cut
    (the vertex-level pass in _cut_polyline owns those)."""
    y0, y1 = float(v0[1]), float(v1[1])
    if abs(y0) < _PLANE_EPS or abs(y1) < _PLANE_EPS or (y0 > 0) == (y1 > 0):
        return None
    n = np.cross(v0, v1)
    d = np.cross(n, _Y_AXIS)
    nd = float(np.linalg.norm(d))
    if nd < 1e-12:  # arc lies (numerically) in the meridian plane
        return None
    d /= nd
    full = _arc_angle(v0, v1)
    for cand in (d, -d):
        # On the minor arc: interior angles add up to the full arc angle.
        if abs(_arc_angle(v0, cand) + _arc_angle(cand, v1) - full) < 1e-9:
            if float(cand[0]) < 0.0 or abs(float(cand[2])) > 1.0 - 1e-12:
                return cand
            return None
    return None


def _resample_arc(v0: np.ndarray, v1: np.ndarray, max_step_rad: float, out: list):
    """Append great-circle subdivisions of (v0, v1] to `out`, recursively
    halving until each piece subtends <= max_step_rad."""
    if _arc_angle(v0, v1) <= max_step_rad * (1.0 + 1e-12):
        out.append(v1)
        return
    mid = _unit(v0 + v1)
    _resample_arc(v0, mid, max_step_rad, out)
    _resample_arc(mid, v1, max_step_rad, out)


def _on_antimeridian(v: np.ndarray) -> bool:
    return abs(float(v[1])) < _PLANE_EPS and (
        float(v[0]) < 0.0 or abs(float(v[2])) > 1.0 - 1e-12)


def _cut_polyline(vecs: list) -> list[list]:
    """Split a vector polyline at antimeridian crossings.

    Mid-edge crossings insert the paired boundary vertex into both pieces.
    A vertex lying exactly on the antimeridian splits the line there when
    its nearest off-plane neighbours sit on opposite sides; runs of vertices
    along the antimeridian itself are left intact.
    """
    ysign = [0 if abs(float(v[1])) < _PLANE_EPS else (1 if float(v[1]) > 0 else -1)
             for v in vecs]

    def _neighbor_sign(i: int, step: int) -> int:
        j = i + step
        while 0 <= j < len(vecs):
            if ysign[j] != 0:
                return ysign[j]
            j += step
        return 0

    pieces: list[list] = []
    current = [vecs[0]]
    for i in range(len(vecs) - 1):
        v0, v1 = vecs[i], vecs[i + 1]
        c = _antimeridian_crossing(v0, v1)
        if c is not None:
            current.append(c)
            pieces.append(current)
            current = [c.copy()]
        current.append(v1)
        interior = 0 < i + 1 < len(vecs) - 1
        if (interior and ysign[i + 1] == 0 and _on_antimeridian(v1)
                and _neighbor_sign(i + 1, -1) * _neighbor_sign(i + 1, 1) < 0):
            pieces.append(current)
            current = [v1.copy()]
    pieces.append(current)
    return pieces


def _neighbour_side(dense: list, j: int) -> float:
    """y-sign of the nearest off-plane vertex (previous first), falling back
    to the nearest nonzero y of any size, then to the vertex's own signed y."""
    for threshold in (_PLANE_EPS, 0.0):
        for k in range(j - 1, -1, -1):
            y = float(dense[k][1])
            if abs(y) > threshold:
                return y
        for k in range(j + 1, len(dense)):
            y = float(dense[k][1])
            if abs(y) > threshold:
                return y
    return math.copysign(1.0, float(dense[j][1]))


def prepare_path(path: GeoPath, r: SphericalRotation, resample_max: float = 1.0) -> GeoPath:
    """Rotate, cut at the rotated antimeridian, and resample a path.

    Every vertex is rotated by `r`; segments are split where their minor
    arcs cross the antimeridian of the rotated frame (paired +-180 boundary
    vertices inserted); each output edge subtends at most `resample_max`
    degrees. Closed input rings take part in cutting through their closure
    edge; pieces of a cut ring are re-joined across the ring's start vertex,
    and uncut rings come back with their closure vertex materialized, so the
    output is always a set of explicit polylines.
    """
    if resample_max <= 0.0:
        raise ValueError("resample_max must be positive")
    max_step = math.radians(resample_max)
    out_segments = []
    for seg in path.segments:
        vecs = [r.matrix @ g.to_vec() for g in seg]
        if len(vecs) == 1:
            out_segments.append((to_geo(vecs[0]),))
            continue
        if path.closed:
            # Start the ring at an off-plane vertex so the glue point below
            # can never itself be an (uncut) antimeridian crossing.
            k = next((i for i, v in enumerate(vecs)
                      if abs(float(v[1])) >= _PLANE_EPS), 0)
            vecs = vecs[k:] + vecs[:k]
            vecs.append(vecs[0].copy())
        pieces = _cut_polyline(vecs)
        if path.closed and len(pieces) > 1:
            # The ring's start vertex is not a cut point; gluing last->first
            # restores continuity there.
            last = pieces.pop()
            pieces[0] = last + pieces[0][1:]
        for piece in pieces:
            dense = [piece[0]]
            for i in range(len(piece) - 1):
                _resample_arc(piece[i], piece[i + 1], max_step, dense)
            geos = []
            for j, v in enumerate(dense):
                g = to_geo(v)
                if abs(g.lat) != 90.0 and abs(abs(g.lon) - 180.0) < 1e-9:
                    # Pin the boundary vertex to the side its piece lives on.
                    g = GeoCoord(math.copysign(180.0, _neighbour_side(dense, j)), g.lat)
                geos.append(g)
            out_segments.append(tuple(geos))
    return GeoPath(tuple(out_segments), closed=False)
