"""JSON files for instances and routes; rationals are stored as "num/den" strings."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from gmpy2 import mpq

from .errors import InvalidInstance
from .geom import ConvexPolygon, Point
from .visibility import Instance

VERSION = 1


def q_to_str(v) -> str:
    v = mpq(v)
    return f"{v.numerator}/{v.denominator}"


def q_from_str(s) -> mpq:
    if isinstance(s, int):
        return mpq(s)
    if not isinstance(s, str):
        raise InvalidInstance(f"rational must be a string, got {s!r}")
    try:
        if "/" in s:
            a, b = s.split("/")
            return mpq(int(a), int(b))
        return mpq(int(s))
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidInstance(f"bad rational {s!r}") from exc


def _plain(v):
    """Metadata values made JSON-friendly (rationals become strings)."""
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if type(v).__name__ == "mpq":
        return q_to_str(v)
    if isinstance(v, (frozenset, set)):
        return sorted(_plain(x) for x in v)
    return v


@dataclass
class InstanceFile:
    instance: Instance
    metadata: dict = field(default_factory=dict)
    version: int = VERSION

    def to_dict(self) -> dict:
        inst = self.instance
        return {
            "version": self.version,
            "box": [q_to_str(v) for v in inst.box],
            "obstacles": [[[q_to_str(x), q_to_str(y)] for x, y in C.vertices] for C in inst.obstacles],
            "metadata": _plain(self.metadata),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "InstanceFile":
        if not isinstance(d, dict) or "version" not in d:
            raise InvalidInstance("missing version field")
        if d["version"] != VERSION:
            raise InvalidInstance(f"unsupported version {d['version']}")
        try:
            box = tuple(q_from_str(v) for v in d["box"])
            obs = tuple(ConvexPolygon([Point(q_from_str(x), q_from_str(y)) for x, y in poly])
                        for poly in d["obstacles"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInstance(f"malformed instance file: {exc}") from exc
        if len(box) != 4:
            raise InvalidInstance("box needs four coordinates")
        return cls(Instance(box, obs), dict(d.get("metadata", {})), d["version"])

    @classmethod
    def loads(cls, text: str) -> "InstanceFile":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidInstance(f"not JSON: {exc}") from exc
        return cls.from_dict(d)

    def digest(self) -> str:
        """sha256 of the canonical geometry (metadata excluded)."""
        d = self.to_dict()
        d.pop("metadata")
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()


def read_instance(path) -> InstanceFile:
    return InstanceFile.loads(Path(path).read_text())


def write_instance(path, inst: Instance, metadata=None) -> InstanceFile:
    f = InstanceFile(inst, dict(metadata or {}))
    Path(path).write_text(f.dumps())
    return f


def route_to_dict(vertices, witness=None, length=None, kind="observation_route", extra=None) -> dict:
    d = {
        "version": VERSION,
        "kind": kind,
        "vertices": [[q_to_str(x), q_to_str(y)] for x, y in vertices],
        "witness": {str(k): [q_to_str(p[0]), q_to_str(p[1])] for k, p in sorted((witness or {}).items())},
    }
    if length is not None:
        d["length"] = float(length)
    if extra:
        d.update(_plain(extra))
    return d


def route_from_dict(d: dict):
    """(vertices, witness dict) from a route file dictionary."""
    try:
        verts = [Point(q_from_str(x), q_from_str(y)) for x, y in d["vertices"]]
        wit = {int(k): Point(q_from_str(x), q_from_str(y)) for k, (x, y) in d.get("witness", {}).items()}
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInstance(f"malformed route file: {exc}") from exc
    return verts, wit


def write_route(path, vertices, witness=None, length=None, kind="observation_route", extra=None):
    Path(path).write_text(json.dumps(route_to_dict(vertices, witness, length, kind, extra),
                                     indent=1, sort_keys=True) + "\n")


def read_route(path):
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InvalidInstance(f"route file is not JSON: {exc}") from exc
    return route_from_dict(d)
