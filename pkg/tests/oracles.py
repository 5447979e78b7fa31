"""Slow, independent reference computations used as test oracles.

Nothing here imports the code paths it is meant to check; everything is
plain Python loops over pixels or scan lines.
"""
import math

import numpy as np


# -- Otsu -------------------------------------------------------------------

def otsu_exhaustive(values):
    """Try every threshold 0..255 (black iff v < t); smallest best t wins."""
    vals = [int(v) for v in np.asarray(values).ravel()]
    if len(set(vals)) == 1:
        return vals[0]
    best_t, best = None, -1.0
    n = len(vals)
    for t in range(256):
        c0 = [v for v in vals if v < t]
        c1 = [v for v in vals if v >= t]
        if not c0 or not c1:
            continue
        m0, m1 = sum(c0) / len(c0), sum(c1) / len(c1)
        between = (len(c0) / n) * (len(c1) / n) * (m0 - m1) ** 2
        if between > best + 1e-12:
            best, best_t = between, t
    return best_t


# -- center of gravity ------------------------------------------------------

def cg_bruteforce(img, x0, y0, w, h):
    sx = sy = n = 0
    for y in range(y0, y0 + h):
        for x in range(x0, x0 + w):
            if img[y][x]:
                sx += x
                sy += y
                n += 1
    if n == 0:
        return x0 + (w - 1) / 2, y0 + (h - 1) / 2
    return sx / n, sy / n


# -- longest run ------------------------------------------------------------

def scan_lines(h, w, direction):
    """Full-image scan lines as ordered lists of (y, x)."""
    lines = []
    if direction == 0:
        lines = [[(y, x) for x in range(w)] for y in range(h)]
    elif direction == 1:
        lines = [[(y, x) for y in range(h)] for x in range(w)]
    elif direction == 2:  # x - y = c, walk down-right
        for c in range(-(h - 1), w):
            lines.append([(y, y + c) for y in range(h) if 0 <= y + c < w])
    else:  # x + y = c, walk down-left
        for c in range(h + w - 1):
            lines.append([(y, c - y) for y in range(h) if 0 <= c - y < w])
    return lines


def runs_on_line(img, line):
    """Maximal black runs as (start, end) index pairs, end exclusive."""
    runs, start = [], None
    for i, (y, x) in enumerate(line):
        if img[y][x]:
            if start is None:
                start = i
        elif start is not None:
            runs.append((start, i))
            start = None
    if start is not None:
        runs.append((start, len(line)))
    return runs


class RunOracle:
    """Enumerates full-image runs once per direction, then answers region queries."""

    def __init__(self, img):
        self.img = [[bool(v) for v in row] for row in np.asarray(img)]
        h, w = len(self.img), len(self.img[0])
        self.lines = {d: scan_lines(h, w, d) for d in range(4)}
        self.runs = {d: [runs_on_line(self.img, ln) for ln in self.lines[d]] for d in range(4)}

    def longest_run(self, x0, y0, w, h, direction):
        total = 0
        for line, runs in zip(self.lines[direction], self.runs[direction]):
            inside = [i for i, (y, x) in enumerate(line)
                      if x0 <= x < x0 + w and y0 <= y < y0 + h]
            if not inside:
                continue
            lo, hi = min(inside), max(inside) + 1
            best = 0
            for s, e in runs:
                if s < hi and e > lo:
                    best = max(best, e - s)
            total += best
        return total


# -- shadows ----------------------------------------------------------------

def _clip(poly, a, b):
    """Sutherland-Hodgman: keep the part of poly left of the directed edge a->b."""
    def side(p):
        return (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])

    out = []
    for i, p in enumerate(poly):
        q = poly[(i + 1) % len(poly)]
        sp, sq = side(p), side(q)
        if sp >= 0:
            out.append(p)
        if (sp >= 0) != (sq >= 0):
            t = sp / (sp - sq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    return out


def _area(poly):
    return 0.5 * abs(sum(p[0] * q[1] - q[0] * p[1]
                         for p, q in zip(poly, poly[1:] + poly[:1])))


def shadow_oracle(img, square, side_segments):
    """Shadow fractions by clipping every ink pixel square against each triangle.

    ``side_segments[k]`` is a list of three (start, end) image-space segments
    for octant k in the order outer, axis, half diagonal; the triangle is the
    hull of their endpoints.
    """
    x0, y0, s, _ = square
    out = []
    for segs in side_segments:
        verts = []
        for p in [segs[1][0], segs[1][1], segs[0][1]]:
            verts.append(p)
        # orient counter-clockwise in image space (y down => use signed area)
        sa = sum(p[0] * q[1] - q[0] * p[1] for p, q in zip(verts, verts[1:] + verts[:1]))
        if sa < 0:
            verts = verts[::-1]
        pieces = []
        for y in range(y0, y0 + s):
            for x in range(x0, x0 + s):
                if not img[y][x]:
                    continue
                poly = [(x - .5, y - .5), (x + .5, y - .5), (x + .5, y + .5), (x - .5, y + .5)]
                for i in range(3):
                    if not poly:
                        break
                    poly = _clip(poly, verts[i], verts[(i + 1) % 3])
                if len(poly) >= 3 and _area(poly) > 1e-9:
                    pieces.append(poly)
        for start, end in segs:
            length = math.dist(start, end)
            ncell = max(1, math.ceil(length - 1e-9))
            ux, uy = (end[0] - start[0]) / length, (end[1] - start[1]) / length
            covered = [False] * ncell
            for poly in pieces:
                ts = [(p[0] - start[0]) * ux + (p[1] - start[1]) * uy for p in poly]
                a, b = max(min(ts), 0.0), min(max(ts), length)
                for i in range(ncell):
                    hi = length if i == ncell - 1 else i + 1
                    if min(b, hi) - max(a, i) > 1e-9:
                        covered[i] = True
            out.append(sum(covered) / ncell)
    return out


# -- distances --------------------------------------------------------------

def distance_oracle(img):
    """Literal scan-line loops for the 8 quadrant distance features of a 64x64 image."""
    img = np.asarray(img)
    n = img.shape[0]
    q = n // 2
    quads = {  # (x range, y range, horizontal step, diagonal step)
        "NW": (range(0, q), range(0, q), 1, (1, 1)),
        "NE": (range(q, n), range(0, q), -1, (-1, 1)),
        "SW": (range(0, q), range(q, n), 1, (1, -1)),
        "SE": (range(q, n), range(q, n), -1, (-1, -1)),
    }
    out = []
    for name in ("NW", "NE", "SW", "SE"):
        xs, ys, hstep, (dx, dy) = quads[name]
        best = None
        for y in ys:
            x = xs[0] if hstep == 1 else xs[-1]
            d = 0
            while x in xs:
                if img[y, x]:
                    best = d if best is None else max(best, d)
                    break
                d += 1
                x += hstep
        out.append(0.0 if best is None else best / q)
        # diagonal lines start on the two image borders bounding the quadrant
        bx = 0 if dx == 1 else n - 1
        by = 0 if dy == 1 else n - 1
        starts = {(x, by) for x in xs} | {(bx, y) for y in ys}
        best = None
        for sx, sy in starts:
            x, y, d = sx, sy, 0
            while x in xs and y in ys:
                if img[y, x]:
                    best = d if best is None else max(best, d)
                    break
                d += 1
                x += dx
                y += dy
        out.append(0.0 if best is None else best / q)
    return out


# -- MLP --------------------------------------------------------------------

def forward_oracle(w1, w2, x):
    """Scalar loops over plain lists."""
    def sig(z):
        return 1.0 / (1.0 + math.exp(-z))

    xa = list(x) + [1.0]
    h = [sig(sum(wi * xi for wi, xi in zip(row, xa))) for row in w1]
    ha = h + [1.0]
    o = [sig(sum(wi * hi for wi, hi in zip(row, ha))) for row in w2]
    return h, o


def loss_oracle(w1, w2, x, target):
    _, o = forward_oracle(w1, w2, x)
    return 0.5 * sum((a - b) ** 2 for a, b in zip(o, target))


def finite_difference(w1, w2, x, target, step=1e-5):
    """Central differences of the loss with respect to every weight."""
    w1 = np.array(w1, dtype=float)
    w2 = np.array(w2, dtype=float)
    grads = []
    for w in (w1, w2):
        g = np.zeros_like(w)
        for idx in np.ndindex(w.shape):
            orig = w[idx]
            w[idx] = orig + step
            up = loss_oracle(w1.tolist(), w2.tolist(), x, target)
            w[idx] = orig - step
            down = loss_oracle(w1.tolist(), w2.tolist(), x, target)
            w[idx] = orig
            g[idx] = (up - down) / (2 * step)
        grads.append(g)
    return grads


def octant_segments(x0, y0, s):
    """Image-space (outer, axis, half diagonal) segments of the 8 octants.

    Octant k spans k*45..(k+1)*45 degrees counter-clockwise from east, with
    screen y pointing down.
    """
    cx, cy, r = x0 + (s - 1) / 2, y0 + (s - 1) / 2, s / 2
    segs = []
    for k in range(8):
        axis_deg = 45 * k if k % 2 == 0 else 45 * (k + 1)
        diag_deg = 45 * (k + 1) if k % 2 == 0 else 45 * k
        ax = round(math.cos(math.radians(axis_deg)))
        ay = round(math.sin(math.radians(axis_deg)))
        dx = 1 if math.cos(math.radians(diag_deg)) > 0 else -1
        dy = 1 if math.sin(math.radians(diag_deg)) > 0 else -1
        center = (cx, cy)
        mid = (cx + r * ax, cy - r * ay)
        corner = (cx + r * dx, cy - r * dy)
        segs.append([(mid, corner), (center, mid), (center, corner)])
    return segs
