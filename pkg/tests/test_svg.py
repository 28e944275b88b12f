import xml.etree.ElementTree as ET

import numpy as np

from conftest import built_fbp, constant_fbp
from fbpstream.core import Curve, TimeGrid, Window
from fbpstream.fboxplot import build_fbp
from fbpstream.svg import SvgStyle, render_fbp_svg

NS = "{http://www.w3.org/2000/svg}"


def classes_of(root):
    return {el.get("class"): el for el in root.iter() if el.get("class")}


def test_document_is_well_formed_with_required_elements(rng):
    root = ET.fromstring(render_fbp_svg(built_fbp(rng)))
    found = classes_of(root)
    assert set(found) >= {"axes", "central-region", "median", "envelope-min", "envelope-max"}
    assert found["central-region"].tag == f"{NS}polygon"
    for name in ("median", "envelope-min", "envelope-max"):
        assert found[name].tag == f"{NS}polyline"
    axis_texts = [el.text for el in found["axes"] if el.tag == f"{NS}text"]
    assert len(axis_texts) >= 4  # numeric ticks on both axes
    for label in axis_texts:
        float(label)


def test_constant_components_draw_horizontal_lines():
    svg = render_fbp_svg(constant_fbp(2.0, w=10))
    root = ET.fromstring(svg)
    median = classes_of(root)["median"]
    ys = {point.split(",")[1] for point in median.get("points").split()}
    assert len(ys) == 1


def test_three_constants_geometry():
    grid = TimeGrid(6)
    curves = [Curve(grid, np.full(6, float(v))) for v in (0, 1, 2)]
    fbp = build_fbp(curves, Window(0, 6))
    style = SvgStyle()
    root = ET.fromstring(render_fbp_svg(fbp, style))
    found = classes_of(root)

    # recompute the y-pixel mapping the renderer uses
    y_lo, y_hi = 0.0, 2.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad
    plot_t, plot_b = style.margin_top, style.height - style.margin_bottom

    def py(v):
        return plot_b - (v - y_lo) / (y_hi - y_lo) * (plot_b - plot_t)

    median_y = {float(p.split(",")[1]) for p in found["median"].get("points").split()}
    assert median_y == {round(py(1.0), 2)}
    region_y = {float(p.split(",")[1]) for p in found["central-region"].get("points").split()}
    assert region_y == {round(py(0.0), 2), round(py(1.0), 2)}


def test_default_colors_and_overrides(rng):
    fbp = built_fbp(rng)
    svg = render_fbp_svg(fbp)
    assert 'stroke="blue"' in svg and 'fill="magenta"' in svg and 'stroke="yellow"' in svg
    styled = render_fbp_svg(fbp, SvgStyle(color_envelope="#004488", color_region="#ff00ff",
                                          color_median="black", title="slot 3"))
    assert 'stroke="#004488"' in styled and ">slot 3</text>" in styled


def test_rendering_is_deterministic(rng):
    fbp = built_fbp(rng)
    assert render_fbp_svg(fbp) == render_fbp_svg(fbp)
