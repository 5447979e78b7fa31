"""Dependency-free SVG line chart for hidden-size sweeps."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape


def sweep_svg(hidden, accuracy, title: str = "Test recognition rate vs hidden neurons",
              width: int = 480, height: int = 320) -> str:
    """One polyline with a vertex per sweep point; NaN accuracies plot at 0."""
    hidden = [int(h) for h in hidden]
    acc = [0.0 if (a is None or math.isnan(a)) else float(a) for a in accuracy]
    left, right, top, bottom = 56, 16, 36, 44
    pw, ph = width - left - right, height - top - bottom
    lo, hi = min(hidden), max(hidden)
    span = (hi - lo) or 1
    amin = min(acc + [1.0])
    amax = max(acc + [0.0])
    amin, amax = math.floor(amin * 10) / 10, math.ceil(amax * 10) / 10
    if amax <= amin:
        amax = amin + 0.1

    def px(h):
        return left + (h - lo) / span * pw if hi > lo else left + pw / 2

    def py(a):
        return top + (amax - a) / (amax - amin) * ph

    pts = " ".join(f"{px(h):.2f},{py(a):.2f}" for h, a in zip(hidden, acc))
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-size="13">{escape(title)}</text>',
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>',
    ]
    for h in hidden:
        parts.append(f'<text x="{px(h):.2f}" y="{top + ph + 16}" text-anchor="middle" '
                     f'font-size="10">{h}</text>')
    steps = int(round((amax - amin) / 0.1))
    for i in range(steps + 1):
        a = amin + i * (amax - amin) / steps
        parts.append(f'<text x="{left - 6}" y="{py(a) + 3:.2f}" text-anchor="end" '
                     f'font-size="10">{100 * a:.0f}%</text>')
    parts.append(f'<text x="{left + pw / 2:.1f}" y="{height - 8}" text-anchor="middle" '
                 f'font-size="11">hidden neurons</text>')
    parts.append(f'<polyline fill="none" stroke="#1f4e9a" stroke-width="2" points="{pts}"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
