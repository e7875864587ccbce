"""Exception types raised across the toolkit."""


class TerralensError(Exception):
    """Base class for all toolkit errors."""


class AntipodalOrCoincident(TerralensError):
    """Bearing requested between coincident or antipodal points."""


class DegeneratePath(TerralensError):
    """Great-circle path direction is undefined (e.g. start at a pole)."""


class DegeneratePolygon(TerralensError):
    """Polygon has duplicate/collinear vertices or no interior."""


class OutsideProjection(TerralensError):
    """Plane point lies outside the projection's valid region."""


class NearPole(TerralensError):
    """Operation is numerically undefined this close to a pole."""


class Unreachable(TerralensError):
    """No recentering rotation can satisfy the requested constraint."""


class GenerationExhausted(TerralensError):
    """Stimulus rejection sampling exceeded its retry budget."""


class EmptyLog(TerralensError):
    """Interaction log contains no samples."""


class EmptySample(TerralensError):
    """Statistic requested over zero observations."""


class DegenerateInput(TerralensError):
    """Statistical test input too small (fewer than 2 subjects/conditions)."""
