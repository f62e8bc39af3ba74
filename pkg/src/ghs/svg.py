"""Minimal static SVG line plots (no plotting runtime dependency).

Every figure emitted by the CLI is accompanied by a CSV with the same
data, so any external plotter can reproduce it; these renderings are for
quick visual inspection only.
"""

from xml.sax.saxutils import escape

_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


def _scale(vals, lo, hi, out_lo, out_hi):
    span = hi - lo
    if span == 0:
        span = 1.0
    return [out_lo + (v - lo) / span * (out_hi - out_lo) for v in vals]


def _polyline(xs, ys, color, width=1.5):
    pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xs, ys))
    return f'<polyline fill="none" stroke="{color}" stroke-width="{width}" points="{pts}"/>'


def render_line_plot(series, labels, path, *, title="", xlabel="iteration",
                     ylabel="value", width=860, height=520, inset=None):
    """Render one or more (x, y) series as an SVG line plot.

    ``series`` is a list of (xs, ys) pairs. ``inset``, when given as
    (start, end), adds a zoomed panel over that x-window with a horizontal
    line at each series' window mean.
    """
    ml, mr, mt, mb = 60, 20, 40, 45
    pw, ph = width - ml - mr, height - mt - mb
    all_x = [x for xs, _ in series for x in xs]
    all_y = [y for _, ys in series for y in ys]
    x_lo, x_hi = min(all_x), max(all_x)
    y_lo, y_hi = min(all_y), max(all_y)
    if y_lo == y_hi:
        y_lo, y_hi = y_lo - 1.0, y_hi + 1.0

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.0f}" y="22" text-anchor="middle" font-size="15" '
        f'font-family="sans-serif">{escape(title)}</text>',
        f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>',
        f'<text x="{width / 2:.0f}" y="{height - 10}" text-anchor="middle" '
        f'font-size="12" font-family="sans-serif">{escape(xlabel)}</text>',
        f'<text x="16" y="{height / 2:.0f}" text-anchor="middle" font-size="12" '
        f'font-family="sans-serif" transform="rotate(-90 16 {height / 2:.0f})">'
        f'{escape(ylabel)}</text>',
    ]
    # axis extreme labels
    parts.append(
        f'<text x="{ml - 6}" y="{mt + ph}" text-anchor="end" font-size="10" '
        f'font-family="sans-serif">{y_lo:.4g}</text>'
    )
    parts.append(
        f'<text x="{ml - 6}" y="{mt + 10}" text-anchor="end" font-size="10" '
        f'font-family="sans-serif">{y_hi:.4g}</text>'
    )
    parts.append(
        f'<text x="{ml}" y="{mt + ph + 14}" font-size="10" '
        f'font-family="sans-serif">{x_lo:g}</text>'
    )
    parts.append(
        f'<text x="{ml + pw}" y="{mt + ph + 14}" text-anchor="end" font-size="10" '
        f'font-family="sans-serif">{x_hi:g}</text>'
    )

    for k, (xs, ys) in enumerate(series):
        color = _COLORS[k % len(_COLORS)]
        px = _scale(xs, x_lo, x_hi, ml, ml + pw)
        py = _scale(ys, y_lo, y_hi, mt + ph, mt)
        parts.append(_polyline(px, py, color))
        if k < len(labels):
            parts.append(
                f'<text x="{ml + pw - 8}" y="{mt + 16 + 14 * k}" text-anchor="end" '
                f'font-size="11" font-family="sans-serif" fill="{color}">'
                f'{escape(labels[k])}</text>'
            )

    if inset is not None:
        w_lo, w_hi = inset
        ix, iy = ml + int(pw * 0.55), mt + int(ph * 0.08)
        iw, ih = int(pw * 0.4), int(ph * 0.35)
        win = []
        for xs, ys in series:
            pair = [(x, y) for x, y in zip(xs, ys) if w_lo <= x < w_hi]
            if pair:
                win.append(pair)
        if win:
            wy = [y for pair in win for _, y in pair]
            wy_lo, wy_hi = min(wy), max(wy)
            if wy_lo == wy_hi:
                wy_lo, wy_hi = wy_lo - 1.0, wy_hi + 1.0
            parts.append(
                f'<rect x="{ix}" y="{iy}" width="{iw}" height="{ih}" '
                f'fill="#fafafa" stroke="#666"/>'
            )
            for k, pair in enumerate(win):
                color = _COLORS[k % len(_COLORS)]
                xs = [x for x, _ in pair]
                ys = [y for _, y in pair]
                px = _scale(xs, w_lo, w_hi, ix, ix + iw)
                py = _scale(ys, wy_lo, wy_hi, iy + ih, iy)
                parts.append(_polyline(px, py, color, width=1.0))
                mean_y = sum(ys) / len(ys)
                my = _scale([mean_y], wy_lo, wy_hi, iy + ih, iy)[0]
                parts.append(
                    f'<line x1="{ix}" y1="{my:.2f}" x2="{ix + iw}" y2="{my:.2f}" '
                    f'stroke="{color}" stroke-dasharray="4,3"/>'
                )
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts))
