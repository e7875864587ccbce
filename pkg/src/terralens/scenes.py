"""World-space embeddings of the four geo visualisations.

World coordinates are metres, right-handed, y-up; the viewer's head sits at
the origin gazing along -z. Each embedding rotates geography first, then maps
the rotated point onto its display surface:

* exocentric globe  - 0.4 m sphere, centre 1 m ahead, front face toward the viewer
* flat map          - Hammer map on a 1 x 0.5 m quad 1 m ahead
* egocentric globe  - inner surface of an 8 m sphere, viewer at 80 % radius,
                      so the initial view centre sits on the far wall 14.4 m away
* curved map        - Hammer map bent onto a 108 x 54 degree spherical section
                      1 m from the head
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from .errors import OutsideProjection, Unreachable
from .projections import (CURVED_H_SPAN, CURVED_V_SPAN, GeoPath,
                          HAMMER_HALF_HEIGHT, HAMMER_HALF_WIDTH, MapPoint,
                          hammer_forward, hammer_inverse)
from .sphere import GeoCoord, SphericalRotation, rotate, wrap_lon


class WorldPoint(NamedTuple):
    x: float
    y: float
    z: float

    def to_array(self) -> np.ndarray:
        return np.array(self)


def _sphere_dir(lon: float, lat: float, z_sign: float) -> np.ndarray:
    """Direction on a display sphere for rotated geo coords: east on the
    viewer's right, north up, (0, 0) toward z_sign * z."""
    lam, phi = math.radians(lon), math.radians(lat)
    c = math.cos(phi)
    return np.array([c * math.sin(lam), math.sin(phi), z_sign * c * math.cos(lam)])


def _sphere_dir_to_geo(d: np.ndarray, z_sign: float) -> GeoCoord:
    lat = math.degrees(math.asin(min(1.0, max(-1.0, float(d[1])))))
    lon = math.degrees(math.atan2(float(d[0]), z_sign * float(d[2])))
    return GeoCoord(wrap_lon(lon), lat)


def _check_on_surface(dist: float, radius: float, tol: float = 1e-6):
    if abs(dist - radius) > tol:
        raise ValueError(f"point at distance {dist} is not on the radius-{radius} surface")


@dataclass(frozen=True)
class SceneBase:
    rotation: SphericalRotation = field(default_factory=SphericalRotation)

    def embed(self, g: GeoCoord) -> WorldPoint:
        return self._embed_rotated(rotate(self.rotation, g))

    def with_rotation(self, r: SphericalRotation):
        return replace(self, rotation=r)

    def params(self) -> dict:
        raise NotImplementedError

    def _embed_rotated(self, g: GeoCoord) -> WorldPoint:
        raise NotImplementedError

    def surface_to_rotated_geo(self, p: WorldPoint) -> GeoCoord:
        """Rotated-frame geo coords of a point on the display surface."""
        raise NotImplementedError


@dataclass(frozen=True)
class ExocentricGlobe(SceneBase):
    kind = "exocentric"
    radius: float = 0.4
    center: tuple[float, float, float] = (0.0, 0.0, -1.0)

    def _embed_rotated(self, g: GeoCoord) -> WorldPoint:
        d = _sphere_dir(g.lon, g.lat, 1.0)
        c = self.center
        return WorldPoint(c[0] + self.radius * d[0],
                          c[1] + self.radius * d[1],
                          c[2] + self.radius * d[2])

    def surface_to_rotated_geo(self, p: WorldPoint) -> GeoCoord:
        d = p.to_array() - np.array(self.center)
        _check_on_surface(float(np.linalg.norm(d)), self.radius)
        return _sphere_dir_to_geo(d / self.radius, 1.0)

    def params(self) -> dict:
        return {"radius": self.radius, "center": list(self.center)}


@dataclass(frozen=True)
class FlatMap(SceneBase):
    kind = "flat"
    width: float = 1.0
    height: float = 0.5
    center: tuple[float, float, float] = (0.0, 0.0, -1.0)

    @property
    def plane_scale(self) -> float:
        # Hammer ellipse bounding box exactly inscribes the quad.
        return self.width / (2.0 * HAMMER_HALF_WIDTH)

    def _embed_rotated(self, g: GeoCoord) -> WorldPoint:
        m = hammer_forward(g)
        s = self.plane_scale
        c = self.center
        return WorldPoint(c[0] + s * m.x, c[1] + s * m.y, c[2])

    def surface_to_rotated_geo(self, p: WorldPoint) -> GeoCoord:
        s = self.plane_scale
        c = self.center
        if abs(p.z - c[2]) > 1e-6:
            raise ValueError(f"point {p} is off the map plane z={c[2]}")
        return hammer_inverse(MapPoint((p.x - c[0]) / s, (p.y - c[1]) / s))

    def params(self) -> dict:
        return {"width": self.width, "height": self.height, "center": list(self.center)}


@dataclass(frozen=True)
class EgocentricGlobe(SceneBase):
    kind = "egocentric"
    radius: float = 8.0
    viewer_radius_fraction: float = 0.8

    @property
    def center(self) -> tuple[float, float, float]:
        # Centre ahead of the viewer so the initial view lands on the far
        # inner wall, (1 + fraction) * radius away.
        return (0.0, 0.0, -self.viewer_radius_fraction * self.radius)

    def _embed_rotated(self, g: GeoCoord) -> WorldPoint:
        # Inner-surface map: mirrored z so it reads east-right from inside.
        d = _sphere_dir(g.lon, g.lat, -1.0)
        c = self.center
        return WorldPoint(c[0] + self.radius * d[0],
                          c[1] + self.radius * d[1],
                          c[2] + self.radius * d[2])

    def surface_to_rotated_geo(self, p: WorldPoint) -> GeoCoord:
        d = p.to_array() - np.array(self.center)
        _check_on_surface(float(np.linalg.norm(d)), self.radius)
        return _sphere_dir_to_geo(d / self.radius, -1.0)

    def params(self) -> dict:
        return {"radius": self.radius,
                "viewer_radius_fraction": self.viewer_radius_fraction,
                "center": list(self.center)}


@dataclass(frozen=True)
class CurvedMap(SceneBase):
    kind = "curved"
    radius: float = 1.0
    h_span: float = CURVED_H_SPAN
    v_span: float = CURVED_V_SPAN

    def _embed_rotated(self, g: GeoCoord) -> WorldPoint:
        m = hammer_forward(g)
        ah = math.radians(m.x / HAMMER_HALF_WIDTH * (self.h_span / 2.0))
        av = math.radians(m.y / HAMMER_HALF_HEIGHT * (self.v_span / 2.0))
        ca = math.cos(av)
        return WorldPoint(self.radius * ca * math.sin(ah),
                          self.radius * math.sin(av),
                          -self.radius * ca * math.cos(ah))

    def surface_to_rotated_geo(self, p: WorldPoint) -> GeoCoord:
        _check_on_surface(float(np.linalg.norm(p.to_array())), self.radius)
        d = p.to_array() / self.radius
        av = math.asin(min(1.0, max(-1.0, float(d[1]))))
        ah = math.atan2(float(d[0]), -float(d[2]))
        x = math.degrees(ah) / (self.h_span / 2.0) * HAMMER_HALF_WIDTH
        y = math.degrees(av) / (self.v_span / 2.0) * HAMMER_HALF_HEIGHT
        return hammer_inverse(MapPoint(x, y))

    def params(self) -> dict:
        return {"radius": self.radius, "h_span": self.h_span, "v_span": self.v_span}


SceneEmbedding = ExocentricGlobe | FlatMap | EgocentricGlobe | CurvedMap

SCENE_KINDS: dict[str, type] = {
    "exocentric": ExocentricGlobe,
    "flat": FlatMap,
    "egocentric": EgocentricGlobe,
    "curved": CurvedMap,
}


def embed(scene: SceneEmbedding, g: GeoCoord) -> WorldPoint:
    """World position of a geographic point under a scene embedding."""
    return scene.embed(g)


def solve_recenter(scene: SceneEmbedding, grabbed: GeoCoord,
                   target_surface: WorldPoint) -> SphericalRotation:
    """Rotation that puts `grabbed` at `target_surface`, preserving roll.

    Solves embed(scene', grabbed) == target_surface for the scene's lambda
    and phi angles in closed form; gamma is carried over unchanged (dragging
    adds no spin). Raises Unreachable when the target cannot be expressed in
    the scene's projected domain or no rotation with this roll reaches it.
    """
    try:
        t_hat = scene.surface_to_rotated_geo(target_surface)
    except OutsideProjection as exc:
        raise Unreachable(str(exc)) from exc
    gamma = scene.rotation.gamma
    gr = math.radians(gamma)
    cg, sg = math.cos(gr), math.sin(gr)
    vt = t_hat.to_vec()
    # Peel the roll off the target: solve Ry(-phi) Rz(lam) v_g = Rx(-gamma) v_t.
    w = np.array([vt[0], cg * vt[1] + sg * vt[2], -sg * vt[1] + cg * vt[2]])
    vg = grabbed.to_vec()
    cos_a = math.hypot(float(vg[0]), float(vg[1]))
    lam_g = math.atan2(float(vg[1]), float(vg[0]))
    if abs(float(w[1])) > cos_a + 1e-12:
        raise Unreachable(
            f"point at latitude {grabbed.lat:.3f} cannot reach that target with fixed roll")
    s = min(1.0, max(-1.0, float(w[1]) / cos_a)) if cos_a > 0 else 0.0
    ux_mag = math.sqrt(max(0.0, cos_a * cos_a - float(w[1]) ** 2))
    uz = float(vg[2])
    wx, wz = float(w[0]), float(w[2])
    candidates = []
    for sigma, ux in ((math.asin(s), ux_mag), (math.pi - math.asin(s), -ux_mag)):
        lam = math.degrees(sigma - lam_g)
        if math.hypot(ux, uz) < 1e-12:
            phi = scene.rotation.phi  # free axis: keep the current tilt
        else:
            phi = math.degrees(math.atan2(wz * ux - wx * uz, wx * ux + wz * uz))
        candidates.append(SphericalRotation(wrap_lon(lam), wrap_lon(phi), gamma))
    # Prefer the branch closest to the current rotation (smallest frame change).
    cur = scene.rotation.matrix
    best = max(candidates, key=lambda r: float(np.trace(r.matrix @ cur.T)))
    return best


def morph(t: float, g: GeoCoord, rotation: SphericalRotation,
          flat: FlatMap | None = None,
          exo: ExocentricGlobe | None = None) -> WorldPoint:
    """Linear world-space interpolation from the flat map (t=0) to the
    exocentric globe (t=1). Endpoints reproduce the embeddings exactly."""
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"morph fraction {t} outside [0, 1]")
    flat = (flat or FlatMap()).with_rotation(rotation)
    exo = (exo or ExocentricGlobe()).with_rotation(rotation)
    if t == 0.0:
        return flat.embed(g)
    if t == 1.0:
        return exo.embed(g)
    a = flat.embed(g)
    b = exo.embed(g)
    return WorldPoint((1.0 - t) * a.x + t * b.x,
                      (1.0 - t) * a.y + t * b.y,
                      (1.0 - t) * a.z + t * b.z)


@dataclass(frozen=True)
class GraticuleLine:
    path: GeoPath
    kind: str          # "meridian" | "parallel"
    degree: float
    emphasized: bool   # thick equator


def graticule(spacing: float = 10.0, step: float = 1.0) -> list[GraticuleLine]:
    """Meridian/parallel polylines at `spacing` degrees, vertices every `step`.

    Parallels are emitted pre-densified (they are small circles, which the
    great-circle resampler must not be asked to interpolate) and run from
    lon -180 to +180; meridians run pole to pole. The equator is flagged.
    """
    if spacing <= 0 or (360.0 / spacing) % 1.0 != 0.0:
        raise ValueError("spacing must divide 360")
    lines: list[GraticuleLine] = []
    n_lat = int(round(180.0 / step))
    for lon in np.arange(-180.0, 180.0, spacing):
        pts = tuple(GeoCoord(float(lon), float(lat))
                    for lat in np.linspace(-90.0, 90.0, n_lat + 1))
        lines.append(GraticuleLine(GeoPath.line(pts), "meridian", float(lon), False))
    n_lon = int(round(360.0 / step))
    for lat in np.arange(-90.0 + spacing, 90.0, spacing):
        pts = tuple(GeoCoord(float(lon), float(lat))
                    for lon in np.linspace(-180.0, 180.0, n_lon + 1))
        lines.append(GraticuleLine(GeoPath.line(pts), "parallel", float(lat),
                                   float(lat) == 0.0))
    return lines


def horizon_rings(scene: EgocentricGlobe,
                  elevations_deg: tuple[float, float] = (-30.0, 30.0),
                  samples: int = 360) -> list[np.ndarray]:
    """Static world-space horizon rings on the egocentric sphere.

    Pure function of the sphere dimensions and the ring elevations; scene
    rotation never enters, so the rings hold still while geography spins.
    """
    rings = []
    c = np.array(scene.center)
    for e in elevations_deg:
        er = math.radians(e)
        t = np.linspace(0.0, 2.0 * math.pi, samples, endpoint=False)
        ring = np.column_stack([
            c[0] + scene.radius * math.cos(er) * np.cos(t),
            c[1] + scene.radius * math.sin(er) * np.ones_like(t),
            c[2] + scene.radius * math.cos(er) * np.sin(t),
        ])
        rings.append(ring)
    return rings
