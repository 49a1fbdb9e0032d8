"""Command line entry point: ``obsroute <command> ...``.

Exit codes: 0 success, 1 invalid input, 2 infeasible or absent result,
3 internal invariant violation.  Diagnostics go to standard error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__, kernels
from .errors import (GeometryError, InvariantViolation, TooManyObstacles, TooManyRegions)
from .geom import Q
from .io import InstanceFile, read_instance, read_route, route_to_dict, write_instance
from .visibility import common_observation_point, visibility_region

EXIT_OK, EXIT_INPUT, EXIT_ABSENT, EXIT_INVARIANT = 0, 1, 2, 3
DEFAULT_SEED = 42
ORP_EXACT_LIMIT = 6


class Absent(Exception):
    """The requested object does not exist (exit code 2)."""


def resolve_seed(flag) -> int:
    """CLI flag, then the OBS_SEED environment variable, then 42."""
    if flag is not None:
        return int(flag)
    env = os.environ.get("OBS_SEED")
    if env not in (None, ""):
        try:
            return int(env)
        except ValueError as exc:
            raise GeometryError(f"OBS_SEED must be an integer, got {env!r}") from exc
    return DEFAULT_SEED


def _emit(obj, out=None):
    text = json.dumps(obj, indent=1, sort_keys=True)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _pt(p):
    return [str(p[0]), str(p[1])]


# ---------------------------------------------------------------------------
# commands


def cmd_solve_orp(args) -> int:
    from .orp import ObservationRoute, solve_orp, validate_observation_route
    from .tspn import Tour
    f = read_instance(args.instance)
    inst = f.instance
    if args.validate_only:
        verts, wit = read_route(args.validate_only)
        from .geom import polyline_length
        L = polyline_length(verts, closed=True) if len(verts) > 1 else 0.0
        route = ObservationRoute(Tour(verts, L, wit), wit)
        rep = validate_observation_route(route, inst)
        _emit({"valid": rep.valid, "length": rep.length, "failures": rep.failures})
        if not rep.valid:
            raise InvariantViolation("route file does not validate")
        return EXIT_OK
    route = solve_orp(inst, validate=True)
    d = route_to_dict(route.tour.vertices, route.observed_from, route.length,
                      extra={"detour_rounds": route.detour_rounds, "fatness": route.fatness,
                             "detours": [[j, c, p] for j, c, p in route.detour_log]})
    _emit(d, args.out)
    if args.out:
        print(f"length {route.length:.9g}  vertices {len(route.tour.vertices)}")
    return EXIT_OK


def cmd_single_point(args) -> int:
    inst = read_instance(args.instance).instance
    c = common_observation_point(inst)
    if c is None:
        raise Absent("no single point sees every obstacle")
    _emit({"point": _pt(c), "float": list(c.to_float())})
    return EXIT_OK


def cmd_visibility(args) -> int:
    inst = read_instance(args.instance).instance
    if not 0 <= args.target < inst.n:
        raise GeometryError(f"target {args.target} out of range 0..{inst.n - 1}")
    V = visibility_region(args.target, inst)
    d = {"target": args.target, "vertices": V.vertex_count, "holes": len(V.holes),
         "area": V.area, "outer": [_pt(p) for p in V.outer],
         "hole_rings": [[_pt(p) for p in h] for h in V.holes]}
    _emit(d, args.out)
    if args.out:
        print(f"vertices {V.vertex_count}  holes {len(V.holes)}  area {V.area:.9g}")
    return EXIT_OK


def cmd_ewrp_convex(args) -> int:
    from .ewrp import best_external_watchman, coverage_check
    inst = read_instance(args.instance).instance
    if not 0 <= args.obstacle < inst.n:
        raise GeometryError(f"obstacle {args.obstacle} out of range")
    P = inst.obstacles[args.obstacle]
    r = best_external_watchman(P)
    _emit({"kind": r.kind.value, "length": r.length, "perimeter": P.perimeter,
           "ratio": r.length / P.perimeter, "covers": coverage_check(r, P),
           "polyline": [_pt(p) for p in r.polyline], "doubled": r.doubled})
    return EXIT_OK


def cmd_gen(args) -> int:
    from . import constructions as cons
    kind = args.family
    meta = {"generator": kind, "version": __version__}
    if kind == "six-squares":
        delta = Q(args.delta)
        inst = cons.six_squares(delta)
        rep = cons.verify_six_squares(inst)
        meta["params"] = {"delta": args.delta, "eps": rep.eps}
    elif kind == "grid-cluster":
        pts = [tuple(int(c) for c in p.split(",")) for p in args.points.split(";") if p.strip()]
        seed = resolve_seed(args.seed)
        art = cons.grid_cluster_instance(pts, samples=args.samples, seed=seed)
        inst = art.instance
        meta["params"] = {"points": [list(p) for p in pts], **art.parameters}
        meta["seed"] = seed
    elif kind == "set-cover":
        ss = cons.SetSystem.parse(args.n, args.sets)
        if ss.m != args.m:
            raise GeometryError(f"--m {args.m} but {ss.m} sets given")
        art = cons.setcover_instance(ss)
        inst = art.instance
        meta["params"] = {"n": args.n, "m": args.m, "sets": [sorted(S) for S in ss.sets],
                          "M": art.parameters["M"], "slab_width": art.parameters["slab_width"],
                          "transform": art.parameters["transform"]}
    elif kind == "packing":
        seed = resolve_seed(args.seed)
        P = cons.disk_packing(args.side, args.kgon, seed)
        inst = P.instance
        meta["params"] = {"side": args.side, "kgon": args.kgon, "n": P.n,
                          "certified": P.certified}
        meta["seed"] = seed
    else:  # argparse restricts the choices
        raise GeometryError(f"unknown family {kind}")
    write_instance(args.out, inst, meta)
    print(f"wrote {args.out}: {inst.n} obstacles")
    return EXIT_OK


def cmd_oracle(args) -> int:
    inst = read_instance(args.instance).instance
    if args.problem == "orp":
        from .orp import discretized_opt_orp
        T = discretized_opt_orp(inst, grid=args.grid)
    else:
        from .tspn import RegionSet, exact_small_tspn, region_from_convex
        T = exact_small_tspn(RegionSet([region_from_convex(C) for C in inst.obstacles], inst.box))
    _emit(route_to_dict(T.vertices, T.witness, T.length, kind=f"{args.problem}_oracle"), args.out)
    if args.out:
        print(f"length {T.length:.9g}")
    return EXIT_OK


def cmd_render(args) -> int:
    from .render import render_svg
    inst = read_instance(args.instance).instance
    region = visibility_region(args.region, inst) if args.region is not None else None
    tour = wit = None
    if args.route:
        tour, wit = read_route(args.route)
    Path(args.out).write_text(render_svg(inst, region, tour, wit))
    print(f"wrote {args.out}")
    return EXIT_OK


@dataclass
class RunReport:
    instance: str
    digest: str
    n: int
    lengths: dict = field(default_factory=dict)
    oracle: dict = field(default_factory=dict)
    valid: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)
    backend: str = kernels.BACKEND


def run_compare(path, with_oracle: bool = False) -> RunReport:
    from .constructions.packing import (as_observation_route, circles_every_obstacle,
                                        strip_traversal_route, touch_route)
    from .ewrp import best_external_watchman
    from .orp import discretized_opt_orp, solve_orp, validate_observation_route
    from .tspn import RegionSet, exact_small_tspn, region_from_convex, tour_is_valid, tspn_tour
    f = read_instance(path)
    inst = f.instance
    rep = RunReport(str(path), f.digest(), inst.n)
    rs = RegionSet([region_from_convex(C) for C in inst.obstacles], inst.box)

    t = time.perf_counter()
    if inst.n <= ORP_EXACT_LIMIT:
        route = solve_orp(inst)
        T = None
    else:
        T, route = touch_route(inst)
    rep.timing["orp"] = time.perf_counter() - t
    rep.lengths["orp"] = route.length
    rep.valid["orp"] = validate_observation_route(route, inst).valid

    t = time.perf_counter()
    if T is None:
        T = tspn_tour(rs)
    rep.timing["tspn"] = time.perf_counter() - t
    rep.lengths["tspn"] = T.length
    rep.valid["tspn"] = tour_is_valid(T, rs)

    t = time.perf_counter()
    if inst.n == 1:
        W = best_external_watchman(inst.obstacles[0])
        rep.lengths["ewrp"] = W.length
        rep.valid["ewrp"] = True
    else:
        S = strip_traversal_route(inst, "ewrp")
        rep.lengths["ewrp_strip"] = S.length
        rep.valid["ewrp_strip"] = (circles_every_obstacle(S, inst)
                                   and validate_observation_route(as_observation_route(S, inst), inst).avoids_interiors)
    rep.timing["ewrp"] = time.perf_counter() - t

    if with_oracle:
        t = time.perf_counter()
        try:
            rep.oracle["orp"] = discretized_opt_orp(inst).length
        except TooManyObstacles:
            rep.oracle["orp"] = None
        try:
            rep.oracle["tspn"] = exact_small_tspn(rs).length
        except TooManyRegions:
            rep.oracle["tspn"] = None
        rep.timing["oracle"] = time.perf_counter() - t
    return rep


def cmd_compare(args) -> int:
    paths = args.instances
    with ThreadPoolExecutor(max_workers=max(1, args.workers)) as ex:
        reports = list(ex.map(lambda p: run_compare(p, args.oracle), paths))
    out = [asdict(r) for r in reports]
    _emit(out if len(out) > 1 else out[0], args.out)
    if any(not all(r.valid.values()) for r in reports):
        raise InvariantViolation("an emitted route failed validation")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="obsroute", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve-orp", help="observation route for an instance")
    s.add_argument("instance")
    s.add_argument("-o", "--out")
    s.add_argument("--validate-only", metavar="ROUTE", help="only validate an existing route file")
    s.set_defaults(func=cmd_solve_orp)

    s = sub.add_parser("single-point", help="a point seeing every obstacle, if any")
    s.add_argument("instance")
    s.set_defaults(func=cmd_single_point)

    s = sub.add_parser("visibility", help="visibility region of one obstacle")
    s.add_argument("instance")
    s.add_argument("--target", type=int, required=True)
    s.add_argument("-o", "--out")
    s.set_defaults(func=cmd_visibility)

    s = sub.add_parser("ewrp-convex", help="shortest external watchman route of one polygon")
    s.add_argument("instance")
    s.add_argument("--obstacle", type=int, default=0)
    s.set_defaults(func=cmd_ewrp_convex)

    s = sub.add_parser("gen", help="generate a constructed instance")
    s.add_argument("family", choices=["six-squares", "grid-cluster", "set-cover", "packing"])
    s.add_argument("-o", "--out", required=True)
    s.add_argument("--delta", default="1")
    s.add_argument("--points", default="0,0")
    s.add_argument("--samples", type=int, default=10_000)
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--m", type=int, default=2)
    s.add_argument("--sets", default="1;2")
    s.add_argument("--side", type=int, default=10)
    s.add_argument("--kgon", type=int, default=8)
    s.add_argument("--seed", type=int, default=None)
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("oracle", help="small exact/discretised oracles")
    s.add_argument("problem", choices=["orp", "tspn"])
    s.add_argument("instance")
    s.add_argument("--grid", type=int, default=16)
    s.add_argument("-o", "--out")
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("render", help="SVG picture of an instance")
    s.add_argument("instance")
    s.add_argument("--route")
    s.add_argument("--region", type=int)
    s.add_argument("-o", "--out", required=True)
    s.set_defaults(func=cmd_render)

    s = sub.add_parser("compare", help="ORP / TSPN / EWRP lengths side by side")
    s.add_argument("instances", nargs="+")
    s.add_argument("--oracle", action="store_true")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("-o", "--out")
    s.set_defaults(func=cmd_compare)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (Absent, TooManyObstacles, TooManyRegions) as exc:
        print(f"no result: {exc}", file=sys.stderr)
        return EXIT_ABSENT
    except (GeometryError, ValueError, OSError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
