"""Time the compiled kernels against the pure Python fallback.

    python benchmarks/bench_kernels.py --points 4000 --repeat 3
"""
from __future__ import annotations

import argparse
import json
import random
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from obsroute import kernels  # noqa: E402
from obsroute.visibility import obstacle_arrays, region_arrays, visibility_region  # noqa: E402

from instances import grid_points, rand_instance  # noqa: E402


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def workloads(points: int, seed: int):
    rng = random.Random(seed)
    inst = rand_instance(rng, 5)
    side = int(np.sqrt(points))
    P = grid_points(inst.box, side)
    verts, offs = obstacle_arrays(inst)
    rpts, roffs, segs = region_arrays(visibility_region(0, inst))
    g = np.random.default_rng(seed)
    cand = g.uniform(0, 10, size=(24, 2))
    D = np.hypot(*(cand[:, None, :] - cand[None, :, :]).transpose(2, 0, 1))
    groups = [list(range(3 * k, 3 * k + 3)) for k in range(8)]
    return {
        "sees_batch": lambda be: be.sees_batch(verts, offs, 0, P),
        "points_in_rings": lambda be: be.points_in_rings(rpts, roffs, P),
        "dist_to_segments": lambda be: be.dist_to_segments(segs, P),
        "gtsp_held_karp": lambda be: be.gtsp_held_karp(D, groups),
    }


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=4000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--json", action="store_true", help="print machine-readable results")
    args = ap.parse_args(argv)

    py = kernels.backend("python")
    try:
        cy = kernels.backend("cython")
    except ImportError:
        print("compiled kernels are not built; run pip install -e . first", file=sys.stderr)
        return 1
    rows = []
    for name, fn in workloads(args.points, args.seed).items():
        a = fn(py)
        b = fn(cy)
        same = (np.allclose(a[0], b[0]) if name == "gtsp_held_karp"
                else np.allclose(np.asarray(a, float), np.asarray(b, float)))
        tp = best_of(lambda: fn(py), args.repeat)
        tc = best_of(lambda: fn(cy), args.repeat)
        rows.append({"kernel": name, "python_s": tp, "cython_s": tc, "speedup": tp / tc, "agree": bool(same)})
    if args.json:
        print(json.dumps(rows, indent=1))
    else:
        print(f"{'kernel':<18}{'python':>11}{'cython':>11}{'speedup':>10}  agree")
        for r in rows:
            print(f"{r['kernel']:<18}{r['python_s']:>10.4f}s{r['cython_s']:>10.4f}s{r['speedup']:>9.1f}x  {r['agree']}")
    return 0 if all(r["agree"] for r in rows) else 1


if __name__ == "__main__":
    sys.exit(main())
