"""SVG figures of a packing."""
from __future__ import annotations

import xml.etree.ElementTree as ET
from pathlib import Path
from typing import Optional, Union

from .cost import CostBreakdown, cost
from .model import ProblemInstance
from .packer import Packing

CANVAS = 1000.0
MARGIN = 20.0


def render_svg(instance: ProblemInstance, p: Packing, path: Union[str, Path],
               breakdown: Optional[CostBreakdown] = None, title: str = "") -> Path:
    """Draw every block, the bounding box and a cost title.

    Placement units are scaled so the longer bbox side spans the 1000-unit
    canvas; SVG y grows downward so the layout is flipped vertically.
    """
    breakdown = breakdown or cost(instance, p)
    x0 = min(0.0, float(p.x.min()))
    y0 = min(0.0, float(p.y.min()))
    scale = CANVAS / max(p.bbox_width, p.bbox_height)
    cw, ch = p.bbox_width * scale, p.bbox_height * scale
    title_h = 40.0

    svg = ET.Element("svg", xmlns="http://www.w3.org/2000/svg",
                     width=f"{cw + 2 * MARGIN:.1f}", height=f"{ch + 2 * MARGIN + title_h:.1f}")
    text = (f"{title + ': ' if title else ''}{instance.name}  "
            f"C={breakdown.total:.6g}  A={breakdown.area:.6g}  W={breakdown.wirelength:.6g}")
    t = ET.SubElement(svg, "text", {"x": str(MARGIN), "y": "26", "font-size": "18",
                                     "font-family": "sans-serif", "class": "title"})
    t.text = text
    g = ET.SubElement(svg, "g", transform=f"translate({MARGIN},{MARGIN + title_h})")

    def sx(v):
        return (v - x0) * scale

    def sy(v, h):
        return ch - (v - y0 + h) * scale

    font = max(4.0, min(14.0, 0.25 * scale * float(min(p.widths.min(), p.heights.min()))))
    for b in instance.blocks:
        w, h = float(p.widths[b.id]), float(p.heights[b.id])
        x, y = float(p.x[b.id]), float(p.y[b.id])
        ET.SubElement(g, "rect", {
            "class": "fixed" if b.is_fixed else "block",
            "x": f"{sx(x):.3f}", "y": f"{sy(y, h):.3f}",
            "width": f"{w * scale:.3f}", "height": f"{h * scale:.3f}",
            "fill": "#e4572e" if b.is_fixed else "#8ab6d6",
            "stroke": "#1b1b1b", "stroke-width": "0.6",
        })
        lbl = ET.SubElement(g, "text", {
            "x": f"{sx(x + w / 2):.3f}", "y": f"{sy(y + h / 2, 0):.3f}",
            "font-size": f"{font:.1f}", "text-anchor": "middle",
            "dominant-baseline": "middle", "font-family": "sans-serif",
        })
        lbl.text = b.name
    ET.SubElement(g, "rect", {"class": "bbox", "x": "0", "y": "0",
                              "width": f"{cw:.3f}", "height": f"{ch:.3f}",
                              "fill": "none", "stroke": "#000", "stroke-width": "2",
                              "stroke-dasharray": "6 3"})
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    ET.ElementTree(svg).write(path, encoding="utf-8", xml_declaration=True)
    return path
