"""Zone features: shadows on octant sides, octant centroids, quadrant distances.

The octant frame cuts the minimal bounding square of the ink with its two
midlines and two diagonals. Octants are numbered counter-clockwise (as seen
on screen, y pointing up) starting with the triangle between the east axis
and the north-east diagonal. A pixel lying exactly on a dividing line goes
to the adjacent octant with the lower index.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .imagecore import Rect, bounding_square

SIDE_NAMES = ("outer", "axis", "halfdiag")
QUADRANTS = ("NW", "NE", "SW", "SE")

@dataclass(frozen=True)
class Side:
    """A triangle side as a segment in (u, v) offsets from the square center."""

    name: str
    start: tuple[float, float]
    end: tuple[float, float]

    @property
    def length(self) -> float:
        return math.dist(self.start, self.end)

    @property
    def cells(self) -> int:
        return max(1, math.ceil(self.length - 1e-9))


@dataclass(frozen=True)
class OctantFrame:
    square: Rect
    # (8, 3, 2) triangle vertices in image (x, y) coordinates
    triangles: np.ndarray
    sides: tuple[tuple[Side, Side, Side], ...]

    @property
    def side(self) -> int:
        return self.square.w

    @property
    def center(self) -> tuple[float, float]:
        s = self.square
        return s.x0 + (s.w - 1) / 2, s.y0 + (s.h - 1) / 2


def _octant_geometry(s: int):
    """Triangle vertices (u, v) and labelled sides for a square of side s."""
    r = s / 2
    tris, sides = [], []
    for k in range(8):
        a, b = k * math.pi / 4, (k + 1) * math.pi / 4
        # one bounding ray is an axis (even multiple of 45 deg), the other a diagonal
        axis_ang, diag_ang = (a, b) if k % 2 == 0 else (b, a)
        mid = (r * round(math.cos(axis_ang)), r * round(math.sin(axis_ang)))
        corner = (r * math.copysign(1, round(math.cos(diag_ang), 9)),
                  r * math.copysign(1, round(math.sin(diag_ang), 9)))
        tris.append(((0.0, 0.0), mid, corner))
        sides.append((Side("outer", mid, corner),
                      Side("axis", (0.0, 0.0), mid),
                      Side("halfdiag", (0.0, 0.0), corner)))
    return tris, tuple(sides)


def octant_labels(u2: np.ndarray, v2: np.ndarray) -> np.ndarray:
    """Octant index for doubled integer offsets (u2, v2) from the center.

    v points up. Boundary rays go to the lower-numbered neighbour, and the
    center itself to octant 0.
    """
    u, v = np.asarray(u2), np.asarray(v2)
    au, av = np.abs(u), np.abs(v)
    lab = np.full(np.broadcast(u, v).shape, -1, dtype=np.int8)
    conds = [
        (u >= 0) & (v >= 0) & (v <= u),            # 0: [0, 45]
        (v > 0) & (u >= 0) & (u < v),              # 1: (45, 90]
        (u < 0) & (v > 0) & (au <= v),             # 2: (90, 135]
        (u < 0) & (v >= 0) & (v < au),             # 3: (135, 180]
        (u < 0) & (v < 0) & (av <= au),            # 4: (180, 225]
        (v < 0) & (u <= 0) & (au < av),            # 5: (225, 270]
        (v < 0) & (u > 0) & (u <= av),             # 6: (270, 315]
        (u > 0) & (v < 0) & (av < u),              # 7: (315, 360)
    ]
    for k in range(7, -1, -1):
        lab[conds[k]] = k
    return lab


@lru_cache(maxsize=128)
def _square_labels(s: int) -> np.ndarray:
    """Octant label for every pixel of an s x s square (row-major)."""
    idx = np.arange(s)
    u2 = 2 * idx[None, :] - (s - 1)
    v2 = (s - 1) - 2 * idx[:, None]
    lab = octant_labels(u2, v2)
    lab.setflags(write=False)
    return lab


def octant_frame_for(square: Rect) -> OctantFrame:
    tris_uv, sides = _octant_geometry(square.w)
    cx = square.x0 + (square.w - 1) / 2
    cy = square.y0 + (square.h - 1) / 2
    tris = np.array([[(cx + u, cy - v) for u, v in tri] for tri in tris_uv])
    return OctantFrame(square, tris, sides)


def octant_frame(img: np.ndarray) -> OctantFrame:
    """Octant frame over the minimal bounding square of the ink."""
    return octant_frame_for(bounding_square(img))


def octant_map(frame: OctantFrame) -> np.ndarray:
    """Per-pixel octant index of the frame's square, shape (side, side)."""
    return _square_labels(frame.side)


def octant_counts(img: np.ndarray, frame: OctantFrame) -> np.ndarray:
    block = img[frame.square.slices()]
    return np.bincount(octant_map(frame)[block], minlength=8)


# --------------------------------------------------------------------------
# Shadow features
# --------------------------------------------------------------------------

# sub-pixel probe offsets (doubled, x10) at 18, 72, 108, ... degrees: one per
# 45-degree slice around a pixel center, never on a dividing line
_PROBES = [(6, 2), (2, 6), (-2, 6), (-6, 2), (-6, -2), (-2, -6), (2, -6), (6, -2)]


@lru_cache(maxsize=128)
def _square_overlap(s: int) -> np.ndarray:
    """(8, s, s) mask: does pixel (row, col) overlap octant k with positive area."""
    idx = np.arange(s)
    u2 = 10 * (2 * idx[None, :] - (s - 1))
    v2 = 10 * ((s - 1) - 2 * idx[:, None])
    out = np.zeros((8, s, s), dtype=bool)
    for du, dv in _PROBES:
        lab = octant_labels(u2 + du, v2 + dv)
        for k in range(8):
            out[k] |= lab == k
    out.setflags(write=False)
    return out


# sign of (u, v) over the quadrant holding each octant
_QUADRANT_SIGNS = [(1, 1), (1, 1), (-1, 1), (-1, 1), (-1, -1), (-1, -1), (1, -1), (1, -1)]


@lru_cache(maxsize=128)
def _shadow_cells(s: int):
    """Cell span each pixel square shades on each side of each octant.

    Returns integer arrays lo, hi of shape (8, 3, s, s): the pixel at
    (row, col) shades cells lo..hi-1 of side j of octant k. Only meaningful
    where the pixel overlaps the octant. The pixel square is first clipped to
    the octant's quadrant (midlines cut pixels only in odd squares); a cut
    along the diagonal leaves every side projection unchanged.
    """
    _, sides = _octant_geometry(s)
    idx = np.arange(s, dtype=np.float64)
    u = np.broadcast_to(idx[None, :] - (s - 1) / 2, (s, s))
    v = np.broadcast_to((s - 1) / 2 - idx[:, None], (s, s))
    lo = np.zeros((8, 3, s, s), dtype=np.int64)
    hi = np.zeros((8, 3, s, s), dtype=np.int64)
    for k in range(8):
        su_, sv_ = _QUADRANT_SIGNS[k]
        u0, u1 = u - 0.5, u + 0.5
        v0, v1 = v - 0.5, v + 0.5
        if su_ > 0:
            u0 = np.maximum(u0, 0.0)
        else:
            u1 = np.minimum(u1, 0.0)
        if sv_ > 0:
            v0 = np.maximum(v0, 0.0)
        else:
            v1 = np.minimum(v1, 0.0)
        for j, side in enumerate(sides[k]):
            (su, sv), (eu, ev) = side.start, side.end
            length = side.length
            du, dv = (eu - su) / length, (ev - sv) / length
            corners = [(cu - su) * du + (cv - sv) * dv
                       for cu in (u0, u1) for cv in (v0, v1)]
            a = np.clip(np.minimum.reduce(corners), 0.0, length)
            b = np.clip(np.maximum.reduce(corners), 0.0, length)
            n = side.cells
            first = np.clip(np.floor(a + 1e-9), 0, n - 1)
            lo[k, j] = first
            hi[k, j] = np.clip(np.ceil(b - 1e-9), first + 1, n)
    lo.setflags(write=False)
    hi.setflags(write=False)
    return lo, hi


def shadow_features(img: np.ndarray, frame: OctantFrame) -> np.ndarray:
    """24 values: fraction of each octant side's unit cells in the octant's shadow.

    Ink pixels are unit squares; an octant casts the orthogonal projection of
    the ink inside its triangle onto each of its sides. Ordered octant 0..7,
    then (outer edge, axis segment, half diagonal).
    """
    s = frame.side
    block = img[frame.square.slices()]
    overlap = _square_overlap(s)
    lo, hi = _shadow_cells(s)
    out = np.zeros((8, 3))
    for k in range(8):
        sel = overlap[k] & block
        if not sel.any():
            continue
        for j in range(3):
            n = frame.sides[k][j].cells
            # difference array marks the union of the covered cell ranges
            cover = np.zeros(n + 1, dtype=np.int64)
            np.add.at(cover, lo[k, j][sel], 1)
            np.add.at(cover, hi[k, j][sel], -1)
            out[k, j] = np.count_nonzero(np.cumsum(cover[:n])) / n
    return out.ravel()


# --------------------------------------------------------------------------
# Centroid features
# --------------------------------------------------------------------------

@lru_cache(maxsize=128)
def _default_centroids(s: int) -> np.ndarray:
    """Centroid of each octant's own pixel set in a fully inked square.

    Octants that own no pixel centre (tiny squares) fall back to the
    triangle's geometric centroid, clipped into the unit square.
    """
    lab = _square_labels(s)
    ys, xs = np.indices((s, s))
    tris, _ = _octant_geometry(s)
    out = np.zeros((8, 2))
    for k in range(8):
        sel = lab == k
        if sel.any():
            out[k] = xs[sel].mean() / s, ys[sel].mean() / s
        else:
            gu = sum(p[0] for p in tris[k]) / 3
            gv = sum(p[1] for p in tris[k]) / 3
            out[k] = ((s - 1) / 2 + gu) / s, ((s - 1) / 2 - gv) / s
    out = np.clip(out, 0.0, 1.0)
    out.setflags(write=False)
    return out


def centroid_features(img: np.ndarray, frame: OctantFrame) -> np.ndarray:
    """16 values: per-octant ink centroid (x, y) relative to the square, over its side."""
    s = frame.side
    block = img[frame.square.slices()]
    lab = _square_labels(s)[block]
    ys, xs = np.nonzero(block)
    counts = np.bincount(lab, minlength=8)
    sx = np.bincount(lab, weights=xs, minlength=8)
    sy = np.bincount(lab, weights=ys, minlength=8)
    out = np.array(_default_centroids(s))
    has = counts > 0
    out[has, 0] = sx[has] / counts[has] / s
    out[has, 1] = sy[has] / counts[has] / s
    return out.ravel()


# --------------------------------------------------------------------------
# Distance features
# --------------------------------------------------------------------------

def _orient(img: np.ndarray, quadrant: str) -> np.ndarray:
    """Flip so that the quadrant's outer corner sits at the top-left."""
    if quadrant in ("NE", "SE"):
        img = img[:, ::-1]
    if quadrant in ("SW", "SE"):
        img = img[::-1, :]
    return img


def _first_ink(lines: np.ndarray) -> np.ndarray:
    """Index of the first True per row, -1 for rows without ink."""
    has = lines.any(axis=1)
    return np.where(has, np.argmax(lines, axis=1), -1)


@lru_cache(maxsize=8)
def _diag_index(q: int):
    """Scan lines from the top and left borders running down-right inside a q x q block.

    Returns a (2q-1, q) index pair padded with -1 past each line's end.
    """
    rows = np.full((2 * q - 1, q), -1, dtype=np.int64)
    cols = np.full((2 * q - 1, q), -1, dtype=np.int64)
    for i, off in enumerate(range(-(q - 1), q)):
        y0, x0 = (0, off) if off >= 0 else (-off, 0)
        n = q - abs(off)
        rows[i, :n] = y0 + np.arange(n)
        cols[i, :n] = x0 + np.arange(n)
    return rows, cols


def distance_features(img: np.ndarray) -> np.ndarray:
    """8 values: per quadrant (NW, NE, SW, SE), max horizontal then diagonal gap.

    Each scan line starts on the image border at the quadrant's outer side
    and counts white pixels before the first ink pixel within the quadrant.
    """
    h, w = img.shape
    q = h // 2
    assert h == w and h % 2 == 0, "distance features need an even square image"
    rows, cols = _diag_index(q)
    valid = rows >= 0
    out = np.zeros((4, 2))
    for i, quad in enumerate(QUADRANTS):
        block = _orient(img, quad)[:q, :q]
        d = _first_ink(block)
        out[i, 0] = d.max(initial=-1) / q if (d >= 0).any() else 0.0
        diag = np.where(valid, block[rows.clip(0), cols.clip(0)], False)
        d = _first_ink(diag)
        out[i, 1] = d.max() / q if (d >= 0).any() else 0.0
    return out.ravel()
