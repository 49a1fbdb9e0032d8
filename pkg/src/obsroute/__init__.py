"""Observation routes and external watchman routes among convex obstacles."""
from .geom import ConvexPolygon, Point, Q, pt
from .visibility import Instance, PolygonWithHoles, sees, visibility_region

__all__ = ["ConvexPolygon", "Point", "Q", "pt", "Instance", "PolygonWithHoles",
           "sees", "visibility_region"]
__version__ = "0.1.0"
