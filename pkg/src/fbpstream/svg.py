"""Self-contained SVG rendering of functional boxplots (no plotting deps)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fboxplot import FunctionalBoxplot


@dataclass(frozen=True)
class SvgStyle:
    width: int = 720
    height: int = 480
    margin_left: int = 64
    margin_right: int = 24
    margin_top: int = 32
    margin_bottom: int = 48
    color_envelope: str = "blue"
    color_region: str = "magenta"
    color_median: str = "yellow"
    background: str = "white"
    stroke_width: float = 2.0
    title: str = ""


def _fmt_tick(value: float) -> str:
    if value == int(value) and abs(value) < 1e6:
        return str(int(value))
    if abs(value) >= 100:
        return f"{value:.0f}"
    if abs(value) >= 1:
        return f"{value:.2f}"
    return f"{value:.3f}"


def render_fbp_svg(fbp: FunctionalBoxplot, style: SvgStyle = SvgStyle()) -> str:
    """Render the five-curve summary: magenta central region, yellow median,
    blue whisker envelopes, plus axes with numeric ticks.

    Pure text output; identical inputs give byte-identical documents.
    """
    s = style
    w = fbp.width
    x = np.arange(w, dtype=np.float64)
    y_lo = float(fbp.envelope_min.values.min())
    y_hi = float(fbp.envelope_max.values.max())
    pad = 0.05 * (y_hi - y_lo) if y_hi > y_lo else 1.0
    y_lo, y_hi = y_lo - pad, y_hi + pad

    plot_l, plot_r = s.margin_left, s.width - s.margin_right
    plot_t, plot_b = s.margin_top, s.height - s.margin_bottom

    def px(t: float) -> float:
        return plot_l + (t / max(w - 1, 1)) * (plot_r - plot_l)

    def py(v: float) -> float:
        return plot_b - (v - y_lo) / (y_hi - y_lo) * (plot_b - plot_t)

    def poly_points(values: np.ndarray) -> str:
        return " ".join(f"{px(t):.2f},{py(v):.2f}" for t, v in zip(x, values))

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{s.width}" height="{s.height}" '
        f'viewBox="0 0 {s.width} {s.height}">',
        f'<rect x="0" y="0" width="{s.width}" height="{s.height}" fill="{s.background}"/>',
    ]
    if s.title:
        lines.append(
            f'<text x="{(plot_l + plot_r) / 2:.1f}" y="20" text-anchor="middle" '
            f'font-family="sans-serif" font-size="14">{s.title}</text>')

    axes = [f'<g class="axes" stroke="black" stroke-width="1" font-family="sans-serif" '
            f'font-size="11">']
    axes.append(f'<line x1="{plot_l}" y1="{plot_b}" x2="{plot_r}" y2="{plot_b}"/>')
    axes.append(f'<line x1="{plot_l}" y1="{plot_t}" x2="{plot_l}" y2="{plot_b}"/>')
    n_xticks = min(6, w)
    for t in sorted({int(round(v)) for v in np.linspace(0, w - 1, n_xticks)}):
        xx = px(t)
        axes.append(f'<line x1="{xx:.2f}" y1="{plot_b}" x2="{xx:.2f}" y2="{plot_b + 5}"/>')
        axes.append(f'<text x="{xx:.2f}" y="{plot_b + 18}" text-anchor="middle" '
                    f'stroke="none">{t}</text>')
    for v in np.linspace(y_lo, y_hi, 5):
        yy = py(v)
        axes.append(f'<line x1="{plot_l - 5}" y1="{yy:.2f}" x2="{plot_l}" y2="{yy:.2f}"/>')
        axes.append(f'<text x="{plot_l - 8}" y="{yy + 4:.2f}" text-anchor="end" '
                    f'stroke="none">{_fmt_tick(v)}</text>')
    axes.append('</g>')
    lines.extend(axes)

    region = (poly_points(fbp.box_lower.values) + " "
              + " ".join(f"{px(t):.2f},{py(v):.2f}"
                         for t, v in zip(x[::-1], fbp.box_upper.values[::-1])))
    lines.append(f'<polygon class="central-region" fill="{s.color_region}" '
                 f'stroke="none" points="{region}"/>')
    lines.append(f'<polyline class="envelope-min" fill="none" stroke="{s.color_envelope}" '
                 f'stroke-width="{s.stroke_width}" points="{poly_points(fbp.envelope_min.values)}"/>')
    lines.append(f'<polyline class="envelope-max" fill="none" stroke="{s.color_envelope}" '
                 f'stroke-width="{s.stroke_width}" points="{poly_points(fbp.envelope_max.values)}"/>')
    lines.append(f'<polyline class="median" fill="none" stroke="{s.color_median}" '
                 f'stroke-width="{s.stroke_width}" points="{poly_points(fbp.median.values)}"/>')
    lines.append('</svg>')
    return "\n".join(lines) + "\n"
