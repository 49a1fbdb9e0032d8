from __future__ import annotations

import json
import random

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from obsroute import cli
from obsroute.errors import InvalidInstance
from obsroute.io import (InstanceFile, q_from_str, q_to_str, read_instance, read_route,
                         write_instance, write_route)
from obsroute.visibility import Instance

from instances import orp_corpus, rand_instance, seven_translates, square, triangle_scene


@given(st.fractions(max_denominator=10 ** 30).map(mpq))
def test_rational_round_trip(v):
    assert q_from_str(q_to_str(v)) == v


def test_bad_rationals():
    for s in ("1/0", "x", "1.5", None, 1.5):
        with pytest.raises(InvalidInstance):
            q_from_str(s)


def _corpus():
    from obsroute.constructions.setcover import SetSystem, setcover_instance
    out = [triangle_scene(), seven_translates(), setcover_instance(SetSystem.parse(2, "1;2")).instance]
    out += list(orp_corpus()[:6])
    rng = random.Random(8)
    out += [rand_instance(rng, 4) for _ in range(4)]
    return out


@pytest.mark.parametrize("inst", _corpus())
def test_instance_round_trip_exact(inst, tmp_path):
    f = write_instance(tmp_path / "a.json", inst, {"k": mpq(1, 3)})
    g = read_instance(tmp_path / "a.json")
    assert g.instance.box == inst.box
    assert [C.vertices for C in g.instance.obstacles] == [C.vertices for C in inst.obstacles]
    assert g.digest() == f.digest()
    assert g.metadata == {"k": "1/3"}
    assert (tmp_path / "a.json").read_text() == g.dumps()


def test_digest_ignores_metadata():
    inst = triangle_scene()
    assert InstanceFile(inst, {"a": 1}).digest() == InstanceFile(inst, {"b": 2}).digest()


def test_version_required():
    d = InstanceFile(triangle_scene()).to_dict()
    d.pop("version")
    with pytest.raises(InvalidInstance):
        InstanceFile.from_dict(d)
    d["version"] = 99
    with pytest.raises(InvalidInstance):
        InstanceFile.from_dict(d)


def test_route_round_trip(tmp_path):
    verts = [(mpq(1, 3), mpq(2, 7)), (mpq(5), mpq(-1, 9))]
    write_route(tmp_path / "r.json", verts, {0: verts[0]}, 1.0)
    v, w = read_route(tmp_path / "r.json")
    assert [tuple(p) for p in v] == verts and tuple(w[0]) == verts[0]


# CLI ---------------------------------------------------------------------------


def _write(tmp_path, inst, name="i.json"):
    p = tmp_path / name
    write_instance(p, inst)
    return str(p)


def test_seed_precedence(monkeypatch):
    monkeypatch.delenv("OBS_SEED", raising=False)
    assert cli.resolve_seed(None) == 42
    monkeypatch.setenv("OBS_SEED", "7")
    assert cli.resolve_seed(None) == 7
    assert cli.resolve_seed(3) == 3


def test_gen_packing_uses_env_seed(tmp_path, monkeypatch):
    monkeypatch.setenv("OBS_SEED", "5")
    out = tmp_path / "p.json"
    assert cli.main(["gen", "packing", "--side", "10", "-o", str(out)]) == 0
    assert read_instance(out).metadata["seed"] == 5
    assert cli.main(["gen", "packing", "--side", "10", "--seed", "9", "-o", str(out)]) == 0
    assert read_instance(out).metadata["seed"] == 9


def test_gen_set_cover_round_trip(tmp_path):
    out = tmp_path / "sc.json"
    assert cli.main(["gen", "set-cover", "--n", "2", "--m", "2", "--sets", "1;2", "-o", str(out)]) == 0
    f = read_instance(out)
    text = out.read_text()
    assert InstanceFile.loads(text).dumps() == text
    assert all("/" in x for C in json.loads(text)["obstacles"] for v in C for x in v)
    assert f.metadata["params"]["sets"] == [[1], [2]]


def test_single_point_present_and_absent(tmp_path, capsys):
    from obsroute.constructions.six_squares import six_squares
    assert cli.main(["single-point", _write(tmp_path, six_squares(1))]) == 0
    assert "point" in json.loads(capsys.readouterr().out)
    pocket = orp_corpus()[0]
    assert cli.main(["single-point", _write(tmp_path, pocket, "p.json")]) == cli.EXIT_ABSENT


def test_invalid_input_exit_1(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["single-point", str(bad)]) == cli.EXIT_INPUT
    overlap = tmp_path / "o.json"
    d = InstanceFile(Instance((0, 0, 9, 9), (square(1, 1), square(4, 1)))).to_dict()
    d["obstacles"][1] = d["obstacles"][0]
    overlap.write_text(json.dumps(d))
    assert cli.main(["single-point", str(overlap)]) == cli.EXIT_INPUT
    assert cli.main(["single-point", str(tmp_path / "missing.json")]) == cli.EXIT_INPUT


def test_solve_orp_invariant_exit_3(tmp_path, monkeypatch):
    import obsroute.orp as orp
    path = _write(tmp_path, Instance((0, 0, 9, 9), (square(1, 1), square(4, 1))))
    monkeypatch.setattr(orp, "sees", lambda p, i, inst: False)
    assert cli.main(["solve-orp", path]) == cli.EXIT_INVARIANT


def test_solve_orp_route_revalidates(tmp_path):
    inst = orp_corpus()[0]
    path = _write(tmp_path, inst)
    route = tmp_path / "r.json"
    assert cli.main(["solve-orp", path, "-o", str(route)]) == 0
    assert cli.main(["solve-orp", path, "--validate-only", str(route)]) == 0
    # a route file that misses obstacles fails validation
    d = json.loads(route.read_text())
    d["witness"] = {}
    route.write_text(json.dumps(d))
    assert cli.main(["solve-orp", path, "--validate-only", str(route)]) == cli.EXIT_INVARIANT


def test_visibility_and_ewrp_commands(tmp_path, capsys):
    path = _write(tmp_path, triangle_scene())
    assert cli.main(["visibility", path, "--target", "0"]) == 0
    assert json.loads(capsys.readouterr().out)["holes"] == 2
    assert cli.main(["visibility", path, "--target", "7"]) == cli.EXIT_INPUT
    capsys.readouterr()
    assert cli.main(["ewrp-convex", path, "--obstacle", "1"]) == 0
    d = json.loads(capsys.readouterr().out)
    assert d["kind"] == "PERIMETER" and d["covers"]


def test_oracle_command_limits(tmp_path):
    from instances import grid_squares
    path = _write(tmp_path, grid_squares())
    assert cli.main(["oracle", "orp", path]) == cli.EXIT_ABSENT


def test_compare_on_packing(tmp_path):
    out = tmp_path / "p.json"
    assert cli.main(["gen", "packing", "--side", "10", "-o", str(out)]) == 0
    rep = cli.run_compare(out)
    assert all(rep.valid.values())
    assert rep.lengths["orp"] <= rep.lengths["ewrp_strip"]
    assert cli.main(["compare", str(out), str(out), "--workers", "2", "-o", str(tmp_path / "c.json")]) == 0
    both = json.loads((tmp_path / "c.json").read_text())
    assert len(both) == 2 and both[0]["lengths"] == both[1]["lengths"]
