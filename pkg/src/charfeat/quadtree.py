"""Quad-tree decomposition and longest-run features.

Regions are split by a horizontal and a vertical line, either through the
center of gravity of the region's own ink (``PartitionMode.CG``) or through
its geometric center (``PartitionMode.EQUAL``). Each node contributes four
longest-run values (row, column, main diagonal, anti diagonal).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .imagecore import Rect, center_of_gravity


class PartitionMode(str, enum.Enum):
    CG = "cg"
    EQUAL = "equal"


class Direction(enum.IntEnum):
    ROW = 0
    COLUMN = 1
    DIAG_MAIN = 2  # top-left to bottom-right, x - y constant
    DIAG_ANTI = 3  # top-right to bottom-left, x + y constant


@dataclass(frozen=True)
class QuadTree:
    depth: int
    mode: PartitionMode
    nodes: tuple[Rect, ...]  # breadth first, children ordered NW, NE, SW, SE

    def level(self, k: int) -> tuple[Rect, ...]:
        start = (4 ** k - 1) // 3
        return self.nodes[start:start + 4 ** k]

    @property
    def leaves(self) -> tuple[Rect, ...]:
        return self.level(self.depth)

    def children(self, i: int) -> tuple[Rect, ...]:
        return self.nodes[4 * i + 1:4 * i + 5]


def node_count(depth: int) -> int:
    return (4 ** (depth + 1) - 1) // 3


def _round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def _split(img: np.ndarray, r: Rect, mode: PartitionMode, margin: int) -> tuple[Rect, ...]:
    if mode is PartitionMode.CG:
        cx, cy = center_of_gravity(img, r)
    else:
        cx, cy = r.x0 + (r.w - 1) / 2, r.y0 + (r.h - 1) / 2
    # each child must stay wide enough for the splits still below it
    sx = min(max(_round_half_up(cx), r.x0 + margin), r.x0 + r.w - margin)
    sy = min(max(_round_half_up(cy), r.y0 + margin), r.y0 + r.h - margin)
    wl, wr = sx - r.x0, r.x0 + r.w - sx
    ht, hb = sy - r.y0, r.y0 + r.h - sy
    return (Rect(r.x0, r.y0, wl, ht), Rect(sx, r.y0, wr, ht),
            Rect(r.x0, sy, wl, hb), Rect(sx, sy, wr, hb))


def build_quadtree(img: np.ndarray, depth: int = 2,
                   mode: PartitionMode | str = PartitionMode.CG) -> QuadTree:
    """Breadth-first quad-tree over the whole image.

    Split points are rounded half up and clamped so every node at level k
    keeps at least ``2 ** (depth - k)`` pixels per side; at the last split
    that is the usual one-pixel minimum.
    """
    mode = PartitionMode(mode)
    if depth < 0:
        raise ValueError("depth must be >= 0")
    h, w = img.shape
    if min(h, w) < 2 ** depth:
        raise ValueError(f"a {w}x{h} image cannot be split to depth {depth}")
    nodes = [Rect(0, 0, w, h)]
    frontier = nodes[:]
    for k in range(depth):
        margin = 2 ** (depth - k - 1)
        nxt = []
        for r in frontier:
            nxt.extend(_split(img, r, mode, margin))
        nodes.extend(nxt)
        frontier = nxt
    return QuadTree(depth, mode, tuple(nodes))


# --------------------------------------------------------------------------
# Run lengths
# --------------------------------------------------------------------------

def _row_runs(a: np.ndarray) -> np.ndarray:
    """Length of the horizontal run of True each pixel belongs to (0 if False)."""
    h, w = a.shape
    p = np.zeros((h, w + 1), dtype=bool)
    p[:, :w] = a
    flat = p.ravel()
    starts = flat & ~np.concatenate(([False], flat[:-1]))
    label = np.cumsum(starts)
    sizes = np.bincount(label[flat], minlength=label[-1] + 1)
    return np.where(flat, sizes[label], 0).reshape(h, w + 1)[:, :w]


@lru_cache(maxsize=256)
def _shear_index(h: int, w: int, anti: bool):
    """Map pixel (y, x) to (line, y) so that each diagonal becomes a row.

    Main diagonals are keyed by x - y, anti diagonals by x + y.
    """
    ys, xs = np.indices((h, w))
    line = xs + ys if anti else xs - ys + (h - 1)
    return line, ys


def _diag_runs(a: np.ndarray, anti: bool) -> np.ndarray:
    h, w = a.shape
    line, ys = _shear_index(h, w, anti)
    sheared = np.zeros((h + w - 1, h), dtype=bool)
    sheared[line, ys] = a
    return _row_runs(sheared)[line, ys]


@dataclass(frozen=True)
class RunMaps:
    """Full-image run length per pixel, one map per direction."""

    maps: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]

    @classmethod
    def of(cls, img: np.ndarray) -> "RunMaps":
        a = np.asarray(img, dtype=bool)
        return cls((_row_runs(a), _row_runs(a.T).T,
                    _diag_runs(a, anti=False), _diag_runs(a, anti=True)))

    def longest_run(self, region: Rect, direction: Direction) -> int:
        block = self.maps[direction][region.slices()]
        if direction == Direction.ROW:
            return int(block.max(axis=1).sum())
        if direction == Direction.COLUMN:
            return int(block.max(axis=0).sum())
        h, w = block.shape
        line, ys = _shear_index(h, w, direction == Direction.DIAG_ANTI)
        sheared = np.zeros((h + w - 1, h), dtype=block.dtype)
        sheared[line, ys] = block
        return int(sheared.max(axis=1).sum())


def longest_run(img: np.ndarray, region: Rect, direction: Direction) -> int:
    """Sum over the region's scan lines of the longest ink run meeting the region.

    Runs are measured on the full image, so a bar crossing the region
    boundary counts at its full length.
    """
    return RunMaps.of(img).longest_run(region, Direction(direction))


def longest_run_features(img: np.ndarray, tree: QuadTree,
                         normalize: str = "image") -> np.ndarray:
    """4 values per node (breadth first): longest runs over the image area.

    ``normalize="region"`` divides by the node's own area instead; it is an
    alternative reading kept for comparison. Values are clamped to 1.
    """
    runs = RunMaps.of(img)
    h, w = img.shape
    out = np.empty((len(tree.nodes), 4))
    for i, r in enumerate(tree.nodes):
        denom = h * w if normalize == "image" else r.area
        for d in Direction:
            out[i, d] = runs.longest_run(r, d) / denom
    return np.minimum(out, 1.0).ravel()


def empty_leaves(img: np.ndarray, tree: QuadTree) -> int:
    """Number of leaves that contain no ink."""
    return sum(1 for r in tree.leaves if not img[r.slices()].any())
