"""Exception types shared across the package."""


class GeometryError(ValueError):
    pass


class DegeneratePolygon(GeometryError):
    pass


class PointInsideBody(GeometryError):
    pass


class PointInsideObstacle(GeometryError):
    pass


class BodiesIntersect(GeometryError):
    pass


class PointNotOnBoundary(GeometryError):
    pass


class NonPositiveFatness(GeometryError):
    pass


class InvalidInstance(GeometryError):
    pass


class NotTranslateFamily(GeometryError):
    pass


class EmptyRegionSet(GeometryError):
    pass


class TooManyRegions(GeometryError):
    pass


class TooManyObstacles(GeometryError):
    pass


class RouteIntersectsInterior(GeometryError):
    pass


class InvalidParameters(GeometryError):
    pass


class PointsNotInGrid(GeometryError):
    pass


class InvalidSetSystem(GeometryError):
    pass


class ClusterNotHiding(GeometryError):
    pass


class InvariantViolation(RuntimeError):
    """An internal postcondition failed; maps to CLI exit code 3."""
