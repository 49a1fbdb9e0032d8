"""Deterministic SVG pictures of instances, visibility regions and routes."""
from __future__ import annotations

from .visibility import Instance, PolygonWithHoles

WIDTH = 800


def _fmt(v: float) -> str:
    s = f"{round(v, 6):.6f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


class _Frame:
    """Maps instance coordinates to SVG pixels with y pointing up."""

    def __init__(self, box):
        x0, y0, x1, y1 = (float(v) for v in box)
        self.x0, self.y1 = x0, y1
        self.scale = WIDTH / max(x1 - x0, 1e-300)
        self.width = WIDTH
        self.height = max(1.0, (y1 - y0) * self.scale)

    def xy(self, p) -> str:
        return f"{_fmt((float(p[0]) - self.x0) * self.scale)},{_fmt((self.y1 - float(p[1])) * self.scale)}"

    def path(self, ring, close=True) -> str:
        d = "M " + " L ".join(self.xy(p) for p in ring)
        return d + (" Z" if close else "")


def render_svg(inst: Instance, region: PolygonWithHoles | None = None, tour=None,
               witnesses=None, title: str = "") -> str:
    fr = _Frame(inst.box)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_fmt(fr.width)}" '
        f'height="{_fmt(fr.height)}" viewBox="0 0 {_fmt(fr.width)} {_fmt(fr.height)}">',
        '<defs><pattern id="hatch" width="6" height="6" patternUnits="userSpaceOnUse" '
        'patternTransform="rotate(45)"><line x1="0" y1="0" x2="0" y2="6" stroke="#c0392b" '
        'stroke-width="1.5"/></pattern></defs>',
    ]
    if title:
        out.append(f"<title>{title}</title>")
    out.append(f'<rect x="0" y="0" width="{_fmt(fr.width)}" height="{_fmt(fr.height)}" '
               'fill="white" stroke="black" stroke-width="1"/>')
    if region is not None:
        d = fr.path(region.outer)
        for h in region.holes:
            d += " " + fr.path(h)
        out.append(f'<path class="region" d="{d}" fill="#d6eaf8" fill-rule="evenodd" '
                   'stroke="#2471a3" stroke-width="1"/>')
        for h in region.holes:
            out.append(f'<path class="hole" d="{fr.path(h)}" fill="url(#hatch)" stroke="#c0392b" '
                       'stroke-width="1"/>')
    for k, C in enumerate(inst.obstacles):
        out.append(f'<path class="obstacle" id="o{k}" d="{fr.path(C.vertices)}" fill="#7f8c8d" '
                   'stroke="black" stroke-width="0.5"/>')
    if tour is not None and len(tour) > 0:
        if len(tour) > 1:
            out.append(f'<path class="tour" d="{fr.path(tour)}" fill="none" stroke="#e67e22" '
                       'stroke-width="2"/>')
        else:
            x, y = fr.xy(tour[0]).split(",")
            out.append(f'<circle class="tour" cx="{x}" cy="{y}" r="4" fill="#e67e22"/>')
    for k, p in sorted((witnesses or {}).items()):
        x, y = fr.xy(p).split(",")
        out.append(f'<circle class="witness" data-obstacle="{k}" cx="{x}" cy="{y}" r="3" '
                   'fill="#27ae60" stroke="black" stroke-width="0.5"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
