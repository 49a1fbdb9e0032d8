from __future__ import annotations

import xml.etree.ElementTree as ET

from obsroute import cli
from obsroute.io import write_instance, write_route
from obsroute.orp import solve_orp
from obsroute.render import render_svg
from obsroute.visibility import visibility_region

from instances import orp_corpus, triangle_scene

NS = "{http://www.w3.org/2000/svg}"


def _classes(svg):
    root = ET.fromstring(svg)
    return [el.get("class") for el in root.iter() if el.get("class")]


def test_empty_overlay():
    svg = render_svg(triangle_scene())
    cls = _classes(svg)
    assert cls.count("obstacle") == 3
    assert "region" not in cls and "tour" not in cls


def test_region_with_two_holes():
    inst = triangle_scene()
    svg = render_svg(inst, visibility_region(0, inst))
    cls = _classes(svg)
    assert cls.count("hole") == 2 and cls.count("region") == 1


def test_deterministic(tmp_path):
    inst = orp_corpus()[2]
    R = solve_orp(inst)
    a = render_svg(inst, None, R.tour.vertices, R.observed_from)
    b = render_svg(inst, None, R.tour.vertices, R.observed_from)
    assert a == b
    ip, rp = tmp_path / "i.json", tmp_path / "r.json"
    write_instance(ip, inst)
    write_route(rp, R.tour.vertices, R.observed_from, R.length)
    outs = []
    for k in range(2):
        out = tmp_path / f"{k}.svg"
        assert cli.main(["render", str(ip), "--route", str(rp), "--region", "0", "-o", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    assert "tour" in _classes(outs[0].decode())
