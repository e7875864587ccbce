"""Computational-cartography toolkit: spherical geometry, the Hammer
projection, VR scene embeddings, spatial-task stimuli and study analytics."""

from .sphere import (GeoCoord, SphericalPolygon, SphericalRotation, geo,
                     great_circle_distance, initial_bearing, destination,
                     cross_track_distance, polygon_area, rotate,
                     inverse_rotate, uniform_sphere_sample)
from .projections import (GeoPath, MapPoint, TissotEllipse, hammer_forward,
                          hammer_inverse, tissot, prepare_path, curved_remap)
from .scenes import (CurvedMap, EgocentricGlobe, ExocentricGlobe, FlatMap,
                     WorldPoint, embed, graticule, horizon_rings, morph,
                     solve_recenter)

__version__ = "0.1.0"

__all__ = [
    "GeoCoord", "SphericalPolygon", "SphericalRotation", "geo",
    "great_circle_distance", "initial_bearing", "destination",
    "cross_track_distance", "polygon_area", "rotate", "inverse_rotate",
    "uniform_sphere_sample",
    "GeoPath", "MapPoint", "TissotEllipse", "hammer_forward",
    "hammer_inverse", "tissot", "prepare_path", "curved_remap",
    "CurvedMap", "EgocentricGlobe", "ExocentricGlobe", "FlatMap",
    "WorldPoint", "embed", "graticule", "horizon_rings", "morph",
    "solve_recenter",
    "__version__",
]
