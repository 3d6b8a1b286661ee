"""Minimal self-contained SVG line plots for fit reports.

Hand-rolled rather than a plotting library so artifacts are byte-for-byte
reproducible (no embedded timestamps or generated ids).
"""

__all__ = ["fit_plot_svg"]

_W, _H = 640, 420
_ML, _MR, _MT, _MB = 70, 20, 20, 50


def _scale(values, lo, hi, out_lo, out_hi):
    span = hi - lo if hi > lo else 1.0
    return [out_lo + (v - lo) / span * (out_hi - out_lo) for v in values]


def fit_plot_svg(sqrt_t, y, y_fit, title: str) -> str:
    """Scatter of transformed trace samples with the fitted line."""
    lo_x, hi_x = min(sqrt_t), max(sqrt_t)
    all_y = list(y) + list(y_fit)
    lo_y, hi_y = min(all_y), max(all_y)
    pad = 0.05 * (hi_y - lo_y if hi_y > lo_y else abs(hi_y) + 1.0)
    lo_y, hi_y = lo_y - pad, hi_y + pad

    xs = _scale(sqrt_t, lo_x, hi_x, _ML, _W - _MR)
    ys = _scale(y, lo_y, hi_y, _H - _MB, _MT)
    yfs = _scale(y_fit, lo_y, hi_y, _H - _MB, _MT)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_ML}" y="14" font-family="monospace" font-size="12">{title}</text>',
        # axes
        f'<line x1="{_ML}" y1="{_H - _MB}" x2="{_W - _MR}" y2="{_H - _MB}" '
        f'stroke="black" stroke-width="1"/>',
        f'<line x1="{_ML}" y1="{_MT}" x2="{_ML}" y2="{_H - _MB}" '
        f'stroke="black" stroke-width="1"/>',
        f'<text x="{(_ML + _W - _MR) // 2}" y="{_H - 14}" font-family="monospace" '
        f'font-size="12" text-anchor="middle">sqrt(t)</text>',
        f'<text x="14" y="{(_MT + _H - _MB) // 2}" font-family="monospace" '
        f'font-size="12" text-anchor="middle" '
        f'transform="rotate(-90 14 {(_MT + _H - _MB) // 2})">theta * t^(n/2)</text>',
        # axis extents
        f'<text x="{_ML}" y="{_H - _MB + 16}" font-family="monospace" font-size="10" '
        f'text-anchor="middle">{lo_x:.4g}</text>',
        f'<text x="{_W - _MR}" y="{_H - _MB + 16}" font-family="monospace" '
        f'font-size="10" text-anchor="middle">{hi_x:.4g}</text>',
        f'<text x="{_ML - 6}" y="{_H - _MB}" font-family="monospace" font-size="10" '
        f'text-anchor="end">{lo_y:.6g}</text>',
        f'<text x="{_ML - 6}" y="{_MT + 10}" font-family="monospace" font-size="10" '
        f'text-anchor="end">{hi_y:.6g}</text>',
    ]
    fit_pts = " ".join(f"{x:.2f},{yy:.2f}" for x, yy in zip(xs, yfs))
    parts.append(
        f'<polyline points="{fit_pts}" fill="none" stroke="#c03020" stroke-width="1.5"/>'
    )
    for x, yy in zip(xs, ys):
        parts.append(f'<circle cx="{x:.2f}" cy="{yy:.2f}" r="3" fill="#1f60a8"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
