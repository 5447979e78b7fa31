"""Directory-per-class datasets, seeded per-class splits and synthetic glyphs."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .imagecore import SIZE, ink_bbox, mask_to_gray, write_pgm


class IngestError(ValueError):
    """Raised when a dataset directory does not follow the class-per-folder layout."""


@dataclass
class Manifest:
    classes: list[str]
    entries: list[tuple[Path, int]] = field(default_factory=list)

    def __len__(self):
        return len(self.entries)

    def by_class(self) -> list[list[tuple[Path, int]]]:
        groups: list[list[tuple[Path, int]]] = [[] for _ in self.classes]
        for path, label in self.entries:
            groups[label].append((path, label))
        return groups

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["path", "label"])
            w.writerows((str(p), lab) for p, lab in self.entries)


@dataclass
class Split:
    train: list[tuple[Path, int]]
    test: list[tuple[Path, int]]


def ingest(root) -> Manifest:
    """Scan ``root/<class>/*.pgm``; classes and entries come out sorted."""
    root = Path(root)
    if not root.is_dir():
        raise IngestError(f"not a readable directory: {root}")
    try:
        children = sorted(root.iterdir())
    except OSError as exc:
        raise IngestError(f"cannot read {root}: {exc}") from None
    classes, entries = [], []
    for child in children:
        if child.name.startswith("."):
            continue
        if not child.is_dir():
            raise IngestError(f"expected only class directories, found file {child}")
        files = sorted(p for p in child.iterdir() if not p.name.startswith("."))
        if not files:
            raise IngestError(f"empty class directory {child}")
        label = len(classes)
        classes.append(child.name)
        for f in files:
            if not f.is_file() or f.suffix.lower() != ".pgm":
                raise IngestError(f"not a PGM file: {f}")
            entries.append((f, label))
    if not classes:
        raise IngestError(f"no class directories under {root}")
    entries.sort(key=lambda e: str(e[0]))
    return Manifest(classes, entries)


def split(manifest: Manifest, train_fraction: float = 0.8, seed: int = 0) -> Split:
    """Per-class seeded shuffle; round(n * fraction) entries go to train, ties up."""
    if not 0 < train_fraction < 1:
        raise ValueError("train_fraction must lie strictly between 0 and 1")
    rng = np.random.default_rng(seed)
    train, test = [], []
    for group in manifest.by_class():
        if not group:
            raise ValueError("every class needs at least one entry")
        order = rng.permutation(len(group))
        n_train = math.floor(len(group) * train_fraction + 0.5)
        train.extend(group[i] for i in order[:n_train])
        test.extend(group[i] for i in order[n_train:])
    return Split(train, test)


# --------------------------------------------------------------------------
# Synthetic glyphs
# --------------------------------------------------------------------------

_YY, _XX = np.mgrid[0:SIZE, 0:SIZE].astype(np.float64)


def rasterize(polylines, width: float, shift=(0, 0)) -> np.ndarray:
    """Ink every pixel whose center lies within width/2 of a polyline segment."""
    dx, dy = shift
    mask = np.zeros((SIZE, SIZE), dtype=bool)
    r2 = (width / 2) ** 2
    for line in polylines:
        pts = np.asarray(line, dtype=np.float64) + (dx, dy)
        for (ax, ay), (bx, by) in zip(pts[:-1], pts[1:]):
            vx, vy = bx - ax, by - ay
            seg2 = vx * vx + vy * vy
            t = 0.0 if seg2 == 0 else np.clip(((_XX - ax) * vx + (_YY - ay) * vy) / seg2, 0, 1)
            d2 = (_XX - ax - t * vx) ** 2 + (_YY - ay - t * vy) ** 2
            mask |= d2 <= r2
    return mask


def _arc(cx, cy, r, start, span, n=24):
    a = start + np.linspace(0.0, span, n)
    return np.column_stack([cx + r * np.cos(a), cy - r * np.sin(a)])


def _template_strokes(kind: int, rng: np.random.Generator):
    cx, cy = rng.uniform(22, 42, size=2)
    theta = rng.uniform(0, math.pi)
    if kind == 0:  # straight bar
        half = rng.uniform(12, 20)
        ux, uy = math.cos(theta) * half, math.sin(theta) * half
        return [[(cx - ux, cy - uy), (cx + ux, cy + uy)]]
    if kind == 1:  # open arc
        r = rng.uniform(10, 18)
        return [_arc(cx, cy, r, rng.uniform(0, 2 * math.pi), rng.uniform(math.pi, 1.7 * math.pi))]
    if kind == 2:  # cross
        half = rng.uniform(10, 18)
        out = []
        for a in (theta, theta + rng.uniform(math.pi / 4, 3 * math.pi / 4)):
            ux, uy = math.cos(a) * half, math.sin(a) * half
            out.append([(cx - ux, cy - uy), (cx + ux, cy + uy)])
        return out
    # box outline
    hw, hh = rng.uniform(8, 16, size=2)
    return [[(cx - hw, cy - hh), (cx + hw, cy - hh), (cx + hw, cy + hh),
             (cx - hw, cy + hh), (cx - hw, cy - hh)]]


def class_templates(n_classes: int, min_diff: int = 60, width: float = 3.0):
    """Deterministic stroke templates, one per class, pairwise distinct.

    Kinds cycle through bar, arc, cross and box; a candidate whose raster is
    within ``min_diff`` pixels of an earlier template is redrawn.
    """
    rng = np.random.default_rng(20240601)
    templates, rasters = [], []
    for k in range(n_classes):
        for _ in range(1000):
            strokes = _template_strokes(k % 4, rng)
            img = rasterize(strokes, width)
            if all(np.count_nonzero(img ^ r) >= min_diff for r in rasters):
                break
        else:
            raise RuntimeError(f"could not find a distinct template for class {k}")
        templates.append(strokes)
        rasters.append(img)
    return templates


def render_sample(strokes, rng: np.random.Generator | None, width: float = 3.0,
                  noise: float = 0.05, noise_scope: str = "bbox") -> np.ndarray:
    """Draw one jittered sample; ``rng=None`` gives the clean template.

    Jitter is a shift of up to 2 px, a stroke width change of up to 1 px and
    flipping each pixel with probability ``noise``. Flips are confined to the
    glyph's bounding box by default; ``noise_scope="frame"`` spreads them
    over the whole image, which drags every bounding square out to the frame.
    """
    if rng is None:
        return rasterize(strokes, width)
    shift = tuple(int(d) for d in rng.integers(-2, 3, size=2))
    w = width + int(rng.integers(-1, 2))
    img = rasterize(strokes, w, shift)
    if noise > 0:
        if noise_scope == "bbox":
            region = ink_bbox(img).slices()
        elif noise_scope == "frame":
            region = (slice(None), slice(None))
        else:
            raise ValueError(f"unknown noise scope {noise_scope!r}")
        block = img[region]
        img[region] = block ^ (rng.random(block.shape) < noise)
    return img


def synth_generate(n_classes: int, per_class: int, seed: int, out_dir,
                   jitter: bool = True, noise: float = 0.05,
                   noise_scope: str = "bbox") -> Manifest:
    """Write ``out_dir/cNN/NNNN.pgm`` glyphs and return their manifest.

    With ``jitter=False`` every sample of a class is its clean template.
    """
    if n_classes < 2:
        raise ValueError("need at least two classes")
    out = Path(out_dir)
    templates = class_templates(n_classes)
    digits = max(2, len(str(n_classes - 1)))
    try:
        out.mkdir(parents=True, exist_ok=True)
        for k, strokes in enumerate(templates):
            cdir = out / f"c{k:0{digits}d}"
            cdir.mkdir(exist_ok=True)
            rng = np.random.default_rng([seed, k])
            for i in range(per_class):
                img = render_sample(strokes, rng if jitter else None, noise=noise,
                                    noise_scope=noise_scope)
                write_pgm(cdir / f"{i:04d}.pgm", mask_to_gray(img))
    except OSError as exc:
        raise IngestError(f"cannot write synthetic data to {out}: {exc}") from None
    return ingest(out)


def offcenter_glyphs(n: int, seed: int = 0) -> list[np.ndarray]:
    """Small strokes confined to a random 24x24 corner patch of the image."""
    rng = np.random.default_rng(seed)
    out = []
    corners = [(2, 2), (38, 2), (2, 38), (38, 38)]
    for i in range(n):
        ox, oy = corners[rng.integers(4)]
        strokes = _template_strokes(i % 4, rng)
        # squeeze the template (drawn around 22..42) into the corner patch
        scaled = [[(ox + (x - 10) * 0.5, oy + (y - 10) * 0.5) for x, y in line] for line in strokes]
        patch = np.zeros((SIZE, SIZE), dtype=bool)
        patch[oy:oy + 24, ox:ox + 24] = True
        img = rasterize(scaled, 2.0) & patch
        if not img.any():
            img[oy + 12, ox + 4:ox + 20] = True
        out.append(img)
    return out
