"""Exact spherical geometry on the unit sphere.

Coordinates cross the API boundary as degrees; internally everything is
unit 3-vectors (x toward lon 0/lat 0, y toward lon 90, z toward the north
pole), which keeps trig stable near the poles and the antimeridian.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AntipodalOrCoincident, DegeneratePath, DegeneratePolygon

_EPS = 1e-12


def wrap_lon(lon: float) -> float:
    """Wrap a longitude into (-180, 180]."""
    lon = math.fmod(lon, 360.0)
    if lon > 180.0:
        lon -= 360.0
    elif lon <= -180.0:
        lon += 360.0
    return lon


@dataclass(frozen=True)
class GeoCoord:
    """Position on the unit sphere: lon in [-180, 180], lat in [-90, 90] degrees.

    At the poles the longitude is canonicalized to 0.
    """

    lon: float
    lat: float

    def __post_init__(self):
        if not (math.isfinite(self.lon) and math.isfinite(self.lat)):
            raise ValueError(f"non-finite coordinate ({self.lon}, {self.lat})")
        if not -180.0 <= self.lon <= 180.0:
            raise ValueError(f"longitude {self.lon} outside [-180, 180]")
        if not -90.0 <= self.lat <= 90.0:
            raise ValueError(f"latitude {self.lat} outside [-90, 90]")
        if abs(self.lat) == 90.0 and self.lon != 0.0:
            object.__setattr__(self, "lon", 0.0)

    def to_vec(self) -> np.ndarray:
        return to_vec(self.lon, self.lat)


def geo(lon: float, lat: float) -> GeoCoord:
    """GeoCoord constructor that wraps arbitrary longitudes first."""
    return GeoCoord(wrap_lon(lon), lat)


def to_vec(lon: float, lat: float) -> np.ndarray:
    """Unit 3-vector for a lon/lat pair in degrees."""
    lam = math.radians(lon)
    phi = math.radians(lat)
    c = math.cos(phi)
    return np.array([c * math.cos(lam), c * math.sin(lam), math.sin(phi)])


def to_geo(v: np.ndarray) -> GeoCoord:
    """GeoCoord for a (not necessarily unit) 3-vector."""
    x, y, z = float(v[0]), float(v[1]), float(v[2])
    hyp = math.hypot(x, y)
    if hyp < _EPS:
        return GeoCoord(0.0, 90.0 if z > 0 else -90.0)
    lat = math.degrees(math.atan2(z, hyp))
    return GeoCoord(math.degrees(math.atan2(y, x)), min(90.0, max(-90.0, lat)))


def _angle_between(u: np.ndarray, v: np.ndarray) -> float:
    """Angle between unit vectors in degrees, atan2-stable near 0 and 180."""
    return math.degrees(math.atan2(float(np.linalg.norm(np.cross(u, v))), float(np.dot(u, v))))


def great_circle_distance(a: GeoCoord, b: GeoCoord) -> float:
    """Angular great-circle distance between two points, in degrees [0, 180]."""
    return _angle_between(a.to_vec(), b.to_vec())


def initial_bearing(a: GeoCoord, b: GeoCoord) -> float:
    """Forward azimuth of the minor arc a->b at a, degrees clockwise from north in [0, 360).

    Raises AntipodalOrCoincident when the minor arc (and hence the bearing)
    is undefined.
    """
    va, vb = a.to_vec(), b.to_vec()
    cross = np.cross(va, vb)
    if float(np.linalg.norm(cross)) < _EPS:
        raise AntipodalOrCoincident(f"bearing undefined between {a} and {b}")
    north, east = _local_frame(va)
    # Tangent of the arc at a: component of vb orthogonal to va.
    t = vb - float(np.dot(va, vb)) * va
    az = math.degrees(math.atan2(float(np.dot(t, east)), float(np.dot(t, north))))
    return az % 360.0


def _local_frame(v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Unit north and east tangent vectors at a surface point."""
    z = np.array([0.0, 0.0, 1.0])
    east = np.cross(z, v)
    n = float(np.linalg.norm(east))
    if n < _EPS:
        raise DegeneratePath("compass directions are undefined at a pole")
    east /= n
    north = np.cross(v, east)
    return north, east


def destination(start: GeoCoord, bearing: float, dist: float) -> GeoCoord:
    """Point reached travelling `dist` degrees from `start` along `bearing`."""
    v = start.to_vec()
    north, east = _local_frame(v)
    b = math.radians(bearing)
    t = math.cos(b) * north + math.sin(b) * east
    d = math.radians(dist)
    return to_geo(math.cos(d) * v + math.sin(d) * t)


def _path_normal(path_start: GeoCoord, path_bearing: float) -> np.ndarray:
    """Pole of the great circle through start with the given bearing, 90 deg left of travel."""
    v = path_start.to_vec()
    north, east = _local_frame(v)
    b = math.radians(path_bearing)
    t = math.cos(b) * north + math.sin(b) * east
    return np.cross(v, t)


def cross_track_distance(path_start: GeoCoord, path_bearing: float, target: GeoCoord) -> float:
    """Signed perpendicular distance (degrees) from `target` to the great circle
    through `path_start` with azimuth `path_bearing`.

    Positive to the left of the travel direction, negative to the right.
    Raises DegeneratePath when the path direction is undefined (start at a pole).
    """
    n = _path_normal(path_start, path_bearing)
    s = float(np.dot(n, target.to_vec()))
    return math.degrees(math.asin(min(1.0, max(-1.0, s))))


@dataclass(frozen=True)
class SphericalPolygon:
    """Simple spherical polygon; vertices counter-clockwise seen from outside,
    edges minor great-circle arcs."""

    vertices: tuple[GeoCoord, ...]

    def __post_init__(self):
        verts = tuple(self.vertices)
        if len(verts) < 3:
            raise DegeneratePolygon("polygon needs at least 3 vertices")
        object.__setattr__(self, "vertices", verts)
        vecs = np.array([v.to_vec() for v in verts])
        nxt = np.roll(vecs, -1, axis=0)
        if np.any(np.linalg.norm(vecs - nxt, axis=1) < 1e-9):
            raise DegeneratePolygon("duplicate consecutive vertices")
        if np.any(np.linalg.norm(vecs + nxt, axis=1) < 1e-9):
            raise DegeneratePolygon("antipodal consecutive vertices")

    def vecs(self) -> np.ndarray:
        return np.array([v.to_vec() for v in self.vertices])


def _triangle_solid_angle(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> float:
    """Signed solid angle of spherical triangle (a, b, c), steradians.

    Positive for counter-clockwise orientation seen from outside.
    """
    triple = float(np.dot(a, np.cross(b, c)))
    denom = 1.0 + float(np.dot(a, b)) + float(np.dot(b, c)) + float(np.dot(c, a))
    return 2.0 * math.atan2(triple, denom)


def polygon_area(p: SphericalPolygon, enclosed_ccw: bool = False) -> float:
    """Area of a spherical polygon in steradians, by a spherical-excess triangle fan.

    By default the result is orientation-normalized (the smaller of the two
    regions the boundary separates, matching the "enclosed area" of the small
    polygons this toolkit generates). Pass enclosed_ccw=True to get the area
    to the left of the stated CCW orientation, in (0, 4*pi).
    """
    vecs = p.vecs()
    signed = 0.0
    for i in range(1, len(vecs) - 1):
        signed += _triangle_solid_angle(vecs[0], vecs[i], vecs[i + 1])
    if abs(signed) < 1e-15:
        raise DegeneratePolygon("polygon has no interior (collinear vertices)")
    if enclosed_ccw:
        return signed if signed > 0 else signed + 4.0 * math.pi
    return abs(signed)


@dataclass(frozen=True)
class SphericalRotation:
    """Three-angle rotation of the geographic frame, degrees.

    `lam` rotates about the polar axis (adds to longitudes), `phi` then tips
    the frame about the view's horizontal axis, `gamma` rolls about the view
    centre. The composed rotation carries the geographic point (-lam, -phi)
    to the view centre (0, 0).
    """

    lam: float = 0.0
    phi: float = 0.0
    gamma: float = 0.0
    _matrix: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        lam, phi, gam = (math.radians(self.lam), math.radians(self.phi),
                         math.radians(self.gamma))
        cl, sl = math.cos(lam), math.sin(lam)
        cp, sp = math.cos(phi), math.sin(phi)
        cg, sg = math.cos(gam), math.sin(gam)
        rz = np.array([[cl, -sl, 0.0], [sl, cl, 0.0], [0.0, 0.0, 1.0]])
        ry = np.array([[cp, 0.0, -sp], [0.0, 1.0, 0.0], [sp, 0.0, cp]])
        rx = np.array([[1.0, 0.0, 0.0], [0.0, cg, -sg], [0.0, sg, cg]])
        object.__setattr__(self, "_matrix", rx @ ry @ rz)

    @property
    def matrix(self) -> np.ndarray:
        """3x3 rotation matrix acting on unit vectors."""
        return self._matrix

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.lam, self.phi, self.gamma)


IDENTITY_ROTATION = SphericalRotation(0.0, 0.0, 0.0)


def rotate(r: SphericalRotation, g: GeoCoord) -> GeoCoord:
    """Apply the frame rotation to a point."""
    return to_geo(r.matrix @ g.to_vec())


def inverse_rotate(r: SphericalRotation, g: GeoCoord) -> GeoCoord:
    """Undo the frame rotation: inverse_rotate(r, rotate(r, g)) == g."""
    return to_geo(r.matrix.T @ g.to_vec())


def rotate_vecs(r: SphericalRotation, vecs: np.ndarray) -> np.ndarray:
    """Rotate an (n, 3) array of unit vectors."""
    return vecs @ r.matrix.T


def uniform_sphere_sample(rng: np.random.Generator) -> GeoCoord:
    """One area-uniform point: lon uniform, sin(lat) uniform."""
    lon = rng.uniform(-180.0, 180.0)
    lat = math.degrees(math.asin(rng.uniform(-1.0, 1.0)))
    return GeoCoord(lon, lat)


def uniform_sphere_vecs(rng: np.random.Generator, n: int) -> np.ndarray:
    """(n, 3) array of area-uniform unit vectors (batch form of the sampler)."""
    lon = np.radians(rng.uniform(-180.0, 180.0, n))
    z = rng.uniform(-1.0, 1.0, n)
    c = np.sqrt(1.0 - z * z)
    return np.column_stack([c * np.cos(lon), c * np.sin(lon), z])


def geodesic_midpoint(a: GeoCoord, b: GeoCoord) -> GeoCoord:
    """Midpoint of the minor arc a->b (undefined for antipodal endpoints)."""
    m = a.to_vec() + b.to_vec()
    n = float(np.linalg.norm(m))
    if n < _EPS:
        raise AntipodalOrCoincident("midpoint undefined for antipodal points")
    return to_geo(m / n)


def point_in_polygon(p: GeoCoord, ring: list[GeoCoord] | tuple[GeoCoord, ...]) -> bool:
    """Winding-number point-in-polygon test on the sphere.

    Works for arbitrary simple rings (convex or not); points lying exactly on
    an edge are not handled specially.
    """
    vp = p.to_vec()
    north, east = _local_frame(vp) if abs(p.lat) < 90.0 else (
        np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0]))
    total = 0.0
    prev = None
    first = None
    for v in ring:
        t = v.to_vec() - vp
        t = t - float(np.dot(t, vp)) * vp
        ang = math.atan2(float(np.dot(t, east)), float(np.dot(t, north)))
        if prev is None:
            first = ang
        else:
            d = ang - prev
            while d > math.pi:
                d -= 2.0 * math.pi
            while d < -math.pi:
                d += 2.0 * math.pi
            total += d
        prev = ang
    d = first - prev
    while d > math.pi:
        d -= 2.0 * math.pi
    while d < -math.pi:
        d += 2.0 * math.pi
    total += d
    return abs(total) > math.pi
