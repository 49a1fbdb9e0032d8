"""The compiled and pure Python kernels must agree, and both must agree with
the exact predicates away from degenerate inputs."""
from __future__ import annotations

import itertools
import random

import numpy as np
import pytest

from obsroute import kernels
from obsroute.geom import Point
from obsroute.visibility import obstacle_arrays, sees, visibility_region, region_arrays
from gmpy2 import mpq

from instances import grid_points, rand_instance

py = kernels.backend("python")
try:
    cy = kernels.backend("cython")
except ImportError:          # extension not built
    cy = None

needs_cy = pytest.mark.skipif(cy is None, reason="compiled kernels not built")


def _scene(seed):
    rng = random.Random(seed)
    inst = rand_instance(rng, rng.randint(2, 5))
    P = grid_points(inst.box, 40)
    return inst, P


@needs_cy
@pytest.mark.parametrize("seed", range(5))
def test_sees_batch_backends_agree(seed):
    inst, P = _scene(seed)
    verts, offs = obstacle_arrays(inst)
    for t in range(inst.n):
        a = py.sees_batch(verts, offs, t, P)
        b = cy.sees_batch(verts, offs, t, P)
        assert np.array_equal(a, b)
        for k in range(0, len(P), 97):
            assert cy.sees_point(verts, offs, t, *P[k]) == a[k]


@pytest.mark.parametrize("seed", range(3))
def test_sees_batch_matches_exact(seed):
    inst, P = _scene(seed)
    verts, offs = obstacle_arrays(inst)
    codes = kernels.sees_batch(verts, offs, 0, P)
    for k in range(0, len(P), 23):
        p = Point(mpq(P[k, 0]), mpq(P[k, 1]))
        if inst.obstacle_containing(p) >= 0:
            assert codes[k] == -1
        else:
            assert codes[k] == int(sees(p, 0, inst))


@needs_cy
@pytest.mark.parametrize("seed", range(3))
def test_region_kernels_agree(seed):
    inst, P = _scene(seed)
    pts, offs, segs = region_arrays(visibility_region(0, inst))
    assert np.array_equal(py.points_in_rings(pts, offs, P), cy.points_in_rings(pts, offs, P))
    assert np.allclose(py.dist_to_segments(segs, P), cy.dist_to_segments(segs, P), rtol=1e-12)


def _brute_gtsp(D, groups):
    best = float("inf")
    for picks in itertools.product(*groups):
        for perm in itertools.permutations(picks[1:]):
            seq = (picks[0],) + perm
            c = sum(D[seq[i], seq[(i + 1) % len(seq)]] for i in range(len(seq)))
            best = min(best, c)
    return best


@pytest.mark.parametrize("seed", range(6))
def test_gtsp_against_enumeration(seed):
    rng = np.random.default_rng(seed)
    sizes = rng.integers(1, 4, size=int(rng.integers(2, 6)))
    pts = rng.uniform(0, 10, size=(int(sizes.sum()), 2))
    D = np.hypot(*(pts[:, None, :] - pts[None, :, :]).transpose(2, 0, 1))
    groups = []
    k = 0
    for s in sizes:
        groups.append(list(range(k, k + int(s))))
        k += int(s)
    want = _brute_gtsp(D, groups)
    backends = [py] + ([cy] if cy is not None else [])
    for be in backends:
        cost, seq = be.gtsp_held_karp(D, groups)
        assert cost == pytest.approx(want, rel=1e-12)
        assert sorted(next(g for g, m in enumerate(groups) if c in m) for c in seq) == list(range(len(groups)))
        tour = sum(D[seq[i], seq[(i + 1) % len(seq)]] for i in range(len(seq)))
        assert tour == pytest.approx(cost, rel=1e-12)


def test_backend_flag(monkeypatch):
    import importlib
    monkeypatch.setenv("OBSROUTE_PURE", "1")
    mod = importlib.reload(kernels)
    try:
        assert mod.BACKEND == "python"
    finally:
        monkeypatch.delenv("OBSROUTE_PURE")
        importlib.reload(kernels)
