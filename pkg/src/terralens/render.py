"""Deterministic SVG (and rasterized PNG) rendering of prepared geometry.

Every render shares one world-space window and pixel transform: the flat map
is drawn through its scene embedding, and morph frames reuse the identical
code path, so frame 0 of a morph is byte-identical to the flat render. The
window is sized to hold both the 1 x 0.5 m map quad and the 0.4 m globe
silhouette of the morph's far endpoint.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import NearPole
from .projections import GeoPath, hammer_forward, prepare_path, tissot
from .scenes import ExocentricGlobe, FlatMap, GraticuleLine, graticule, morph
from .sphere import GeoCoord, SphericalRotation

WORLD_HALF_X = 0.6
WORLD_HALF_Y = 0.45

STYLE = {
    "boundary": 'fill="none" stroke="#404040" stroke-width="1.2"',
    "meridian": 'fill="none" stroke="#9db8d2" stroke-width="0.6"',
    "parallel": 'fill="none" stroke="#9db8d2" stroke-width="0.6"',
    "equator": 'fill="none" stroke="#5a7fa8" stroke-width="1.6"',
    "coastline": 'fill="none" stroke="#2f7d32" stroke-width="0.9"',
    "tissot": 'fill="#d03a3a" fill-opacity="0.25" stroke="#d03a3a" stroke-width="0.7"',
}


@dataclass(frozen=True)
class PixelTransform:
    size: int

    @property
    def width(self) -> int:
        return self.size

    @property
    def height(self) -> int:
        return int(round(self.size * WORLD_HALF_Y / WORLD_HALF_X))

    @property
    def scale(self) -> float:
        return self.size / (2.0 * WORLD_HALF_X)

    def to_px(self, wx: float, wy: float) -> tuple[float, float]:
        return ((wx + WORLD_HALF_X) * self.scale,
                (WORLD_HALF_Y - wy) * self.scale)


def _fmt(v: float) -> str:
    s = f"{v:.3f}"
    return "0.000" if s == "-0.000" else s


def _polyline_path(points_px) -> str:
    head = points_px[0]
    parts = [f"M{_fmt(head[0])},{_fmt(head[1])}"]
    parts.extend(f"L{_fmt(x)},{_fmt(y)}" for x, y in points_px[1:])
    return "".join(parts)


@dataclass
class SvgCanvas:
    transform: PixelTransform
    elements: list[str] = field(default_factory=list)

    def add_path(self, cls: str, points_px):
        if len(points_px) < 2:
            return
        self.elements.append(
            f'<path class="{cls}" {STYLE[cls]} d="{_polyline_path(points_px)}"/>')

    def add_ellipse(self, cls: str, cx, cy, rx, ry, angle_deg=0.0):
        attrs = f'cx="{_fmt(cx)}" cy="{_fmt(cy)}" rx="{_fmt(rx)}" ry="{_fmt(ry)}"'
        if angle_deg != 0.0:
            attrs += f' transform="rotate({_fmt(angle_deg)} {_fmt(cx)} {_fmt(cy)})"'
        self.elements.append(f'<ellipse class="{cls}" {STYLE[cls]} {attrs}/>')

    def to_svg(self) -> str:
        w, h = self.transform.width, self.transform.height
        body = "\n".join(self.elements)
        return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
                f'viewBox="0 0 {w} {h}">\n'
                f'<rect width="{w}" height="{h}" fill="#ffffff"/>\n'
                f"{body}\n</svg>\n")


def _world_xy(scene, vertex: GeoCoord) -> tuple[float, float]:
    p = scene.embed(vertex)
    return p.x, p.y


class _FlatLaw:
    """Flat map: prepared (already rotated) geometry through the map quad."""

    def __init__(self):
        self.scene = FlatMap()  # identity rotation: paths are pre-rotated

    def project(self, vertex: GeoCoord) -> tuple[float, float]:
        return _world_xy(self.scene, vertex)

    def plane_scale(self) -> float:
        return self.scene.plane_scale


class _CurvedPreviewLaw:
    """Curved map preview: the angle box flattened into the same quad slot."""

    H_HALF = 0.5
    V_HALF = 0.25

    def project(self, vertex: GeoCoord) -> tuple[float, float]:
        from .projections import curved_remap
        ah, av = curved_remap(hammer_forward(vertex))
        return (ah / 54.0 * self.H_HALF, av / 27.0 * self.V_HALF)

    def plane_scale(self) -> float:
        return FlatMap().plane_scale


class _MorphLaw:
    """Morph frame: world positions linearly between flat map and globe."""

    def __init__(self, t: float):
        self.t = t
        self.ident = SphericalRotation()

    def project(self, vertex: GeoCoord) -> tuple[float, float]:
        p = morph(self.t, vertex, self.ident)
        return p.x, p.y


def _project_paths(canvas: SvgCanvas, law, cls: str, path: GeoPath):
    for seg in path.segments:
        pts = [canvas.transform.to_px(*law.project(g)) for g in seg]
        canvas.add_path(cls, pts)


def _graticule_class(line: GraticuleLine) -> str:
    if line.emphasized:
        return "equator"
    return line.kind


def _draw_boundary(canvas: SvgCanvas):
    cx, cy = canvas.transform.to_px(0.0, 0.0)
    k = canvas.transform.scale
    canvas.add_ellipse("boundary", cx, cy, 0.5 * k, 0.25 * k)


def _draw_tissot(canvas: SvgCanvas, law, spacing: float, base_radius_deg: float = 6.0):
    r = math.radians(base_radius_deg)
    s = law.plane_scale() * canvas.transform.scale
    for lon in np.arange(-180.0, 180.0 + spacing / 2.0, spacing):
        for lat in np.arange(-90.0 + spacing, 90.0 - spacing / 2.0, spacing):
            try:
                e = tissot(GeoCoord(float(lon), float(lat)))
            except NearPole:
                continue
            m = hammer_forward(GeoCoord(float(lon), float(lat)))
            cx, cy = canvas.transform.to_px(m.x * law.plane_scale(), m.y * law.plane_scale())
            canvas.add_ellipse("tissot", cx, cy, e.semi_major * r * s,
                               e.semi_minor * r * s, -e.orientation_deg)


def render_map(rotation: SphericalRotation, *, projection: str = "flat",
               graticule_spacing: float = 10.0, tissot_spacing: float = 30.0,
               size: int = 1100, coast_paths: list[GeoPath] | None = None,
               resample_max: float = 1.0) -> str:
    """SVG map: ellipse boundary, graticule (equator emphasized), optional
    Tissot indicatrices and coastlines, under the given recentering rotation.

    `projection` is "flat" or "curved-preview"; `tissot_spacing` of 0 disables
    the indicatrices.
    """
    law = _FlatLaw() if projection == "flat" else _CurvedPreviewLaw()
    canvas = SvgCanvas(PixelTransform(size))
    _draw_boundary(canvas)
    for line in graticule(graticule_spacing):
        prepared = prepare_path(line.path, rotation, resample_max)
        _project_paths(canvas, law, _graticule_class(line), prepared)
    for path in coast_paths or []:
        _project_paths(canvas, law, "coastline",
                       prepare_path(path, rotation, resample_max))
    if tissot_spacing:
        _draw_tissot(canvas, law, tissot_spacing)
    return canvas.to_svg()


def render_morph_frame(t: float, rotation: SphericalRotation, *,
                       graticule_spacing: float = 10.0, size: int = 1100,
                       coast_paths: list[GeoPath] | None = None,
                       resample_max: float = 1.0) -> str:
    """One frame of the flat-map-to-globe morph, orthographic front view."""
    law = _MorphLaw(t)
    canvas = SvgCanvas(PixelTransform(size))
    if t == 0.0:
        _draw_boundary(canvas)
    for line in graticule(graticule_spacing):
        prepared = prepare_path(line.path, rotation, resample_max)
        _project_paths(canvas, law, _graticule_class(line), prepared)
    for path in coast_paths or []:
        _project_paths(canvas, law, "coastline",
                       prepare_path(path, rotation, resample_max))
    return canvas.to_svg()


def svg_to_png(svg_text: str, out_path: str | Path):
    """Rasterize a canvas SVG (as produced above) via matplotlib."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    from matplotlib import patches

    import re
    m = re.search(r'viewBox="0 0 (\d+) (\d+)"', svg_text)
    w, h = int(m.group(1)), int(m.group(2))
    fig = plt.figure(figsize=(w / 100.0, h / 100.0), dpi=100)
    ax = fig.add_axes([0, 0, 1, 1])
    ax.set_xlim(0, w)
    ax.set_ylim(h, 0)
    ax.axis("off")
    for path_m in re.finditer(r'<path class="(\w+)"[^>]* d="([^"]+)"/>', svg_text):
        cls, d = path_m.group(1), path_m.group(2)
        pts = np.array([[float(c) for c in tok.split(",")]
                        for tok in re.findall(r"[ML]([-\d.]+,[-\d.]+)", d)])
        color = _mpl_color(cls)
        ax.plot(pts[:, 0], pts[:, 1], color=color, linewidth=_mpl_width(cls))
    for el_m in re.finditer(r'<ellipse class="(\w+)"[^>]*cx="([-\d.]+)" cy="([-\d.]+)" '
                            r'rx="([-\d.]+)" ry="([-\d.]+)"'
                            r'(?: transform="rotate\(([-\d.]+) [-\d.]+ [-\d.]+\)")?', svg_text):
        cls = el_m.group(1)
        cx, cy, rx, ry = (float(el_m.group(i)) for i in range(2, 6))
        ang = float(el_m.group(6)) if el_m.group(6) else 0.0
        e = patches.Ellipse((cx, cy), 2 * rx, 2 * ry, angle=-ang,
                            fill=cls == "tissot", alpha=0.5 if cls == "tissot" else 1.0,
                            edgecolor=_mpl_color(cls), facecolor=_mpl_color(cls),
                            linewidth=_mpl_width(cls))
        ax.add_patch(e)
    fig.savefig(out_path, format="png", metadata={"Software": None})
    plt.close(fig)


def _mpl_color(cls: str) -> str:
    return {"boundary": "#404040", "meridian": "#9db8d2", "parallel": "#9db8d2",
            "equator": "#5a7fa8", "coastline": "#2f7d32", "tissot": "#d03a3a"}[cls]


def _mpl_width(cls: str) -> float:
    return {"boundary": 1.2, "meridian": 0.6, "parallel": 0.6, "equator": 1.6,
            "coastline": 0.9, "tissot": 0.7}[cls]


# ---------------------------------------------------------------------------
# GeoJSON ingestion
# ---------------------------------------------------------------------------

def _coords_to_geopath(coords, closed: bool) -> GeoPath:
    pts = []
    for c in coords:
        lon, lat = float(c[0]), float(c[1])
        lon = min(180.0, max(-180.0, lon))
        lat = min(90.0, max(-90.0, lat))
        pts.append(GeoCoord(lon, lat))
    if closed and len(pts) > 1 and pts[0] == pts[-1]:
        pts = pts[:-1]  # implicit ring closure
    return GeoPath((tuple(pts),), closed=closed)


def _geometry_paths(geom: dict) -> list[GeoPath]:
    gtype = geom.get("type")
    coords = geom.get("coordinates")
    if gtype == "LineString":
        return [_coords_to_geopath(coords, False)]
    if gtype == "MultiLineString":
        return [_coords_to_geopath(c, False) for c in coords]
    if gtype == "Polygon":
        return [_coords_to_geopath(ring, True) for ring in coords]
    if gtype == "MultiPolygon":
        return [_coords_to_geopath(ring, True) for poly in coords for ring in poly]
    if gtype == "GeometryCollection":
        return [p for g in geom.get("geometries", []) for p in _geometry_paths(g)]
    raise ValueError(f"unsupported GeoJSON geometry type: {gtype!r}")


def load_geojson_paths(path: str | Path) -> list[GeoPath]:
    """Coastline GeoJSON (FeatureCollection/Feature/geometry) as GeoPaths."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValueError(f"cannot read GeoJSON {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValueError(f"{path}: GeoJSON root must be an object")
    dtype = doc.get("type")
    try:
        if dtype == "FeatureCollection":
            return [p for feat in doc.get("features", [])
                    for p in _geometry_paths(feat.get("geometry") or {})]
        if dtype == "Feature":
            return _geometry_paths(doc.get("geometry") or {})
        return _geometry_paths(doc)
    except (TypeError, KeyError, IndexError) as exc:
        raise ValueError(f"{path}: malformed GeoJSON ({exc})") from exc
