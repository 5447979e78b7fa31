"""The 132-component descriptor and its CSV file format.

Layout at the default depth of 2::

    [0:24]    shadow       8 octants x (outer edge, axis segment, half diagonal)
    [24:40]   centroid     8 octants x (x, y)
    [40:48]   distance     (NW, NE, SW, SE) x (horizontal, diagonal)
    [48:132]  longest run  21 nodes x (row, column, main diag, anti diag)
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .imagecore import SIZE, NoInkError, Rect
from .quadtree import PartitionMode, build_quadtree, longest_run_features, node_count
from .zonefeat import (
    centroid_features,
    distance_features,
    octant_frame,
    octant_frame_for,
    shadow_features,
)

N_SHADOW, N_CENTROID, N_DISTANCE = 24, 16, 8

SHADOW = slice(0, 24)
CENTROID = slice(24, 40)
DISTANCE = slice(40, 48)
LONGEST_RUN = slice(48, None)


class FeatureFileError(ValueError):
    """Raised when a feature CSV does not match the schema."""


@dataclass(frozen=True)
class DescriptorConfig:
    depth: int = 2
    mode: PartitionMode = PartitionMode.CG

    def __post_init__(self):
        object.__setattr__(self, "mode", PartitionMode(self.mode))

    @property
    def dim(self) -> int:
        return N_SHADOW + N_CENTROID + N_DISTANCE + 4 * node_count(self.depth)


@dataclass
class LabeledSample:
    id: str
    label: int
    features: np.ndarray = field(repr=False)


def extract_descriptor(img: np.ndarray, config: DescriptorConfig = DescriptorConfig()) -> np.ndarray:
    """Feature vector of a 64x64 binary image, every component in [0, 1].

    A blank image gets zeros everywhere except the centroid block, which
    holds the octant defaults of the full-image square.
    """
    img = np.asarray(img, dtype=bool)
    if img.shape != (SIZE, SIZE):
        raise ValueError(f"expected a {SIZE}x{SIZE} image, got {img.shape}")
    out = np.zeros(config.dim)
    try:
        frame = octant_frame(img)
    except NoInkError:
        out[CENTROID] = centroid_features(img, octant_frame_for(Rect(0, 0, SIZE, SIZE)))
        return out
    out[SHADOW] = shadow_features(img, frame)
    out[CENTROID] = centroid_features(img, frame)
    out[DISTANCE] = distance_features(img)
    tree = build_quadtree(img, config.depth, config.mode)
    out[LONGEST_RUN] = longest_run_features(img, tree)
    return out


def extract_many(images, config: DescriptorConfig = DescriptorConfig(), jobs: int = 1) -> np.ndarray:
    """Stack descriptors of many images; row order follows the input."""
    images = list(images)
    if jobs == 1 or len(images) < 2:
        rows = [extract_descriptor(im, config) for im in images]
    else:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(extract_descriptor, images, [config] * len(images),
                                 chunksize=32))
    return np.array(rows).reshape(len(images), config.dim)


# --------------------------------------------------------------------------
# CSV
# --------------------------------------------------------------------------

def feature_header(dim: int) -> list[str]:
    return ["id", "label"] + [f"f{i:03d}" for i in range(dim)]


def write_features(samples, sink) -> int:
    """Write samples as CSV to a text sink; returns the number of bytes written.

    Features are printed with 9 significant digits. An empty list yields a
    header for the default 132-dimensional layout.
    """
    samples = list(samples)
    dim = len(samples[0].features) if samples else DescriptorConfig().dim
    lines = [",".join(feature_header(dim))]
    for s in samples:
        if len(s.features) != dim:
            raise ValueError(f"sample {s.id!r} has {len(s.features)} features, expected {dim}")
        row = [str(s.id), str(int(s.label))] + ["%.9g" % v for v in s.features]
        lines.append(",".join(row))
    text = "\n".join(lines) + "\n"
    sink.write(text)
    return len(text.encode("utf-8"))


def read_features(source) -> list[LabeledSample]:
    """Parse a feature CSV from a text source, validating every row."""
    reader = csv.reader(source)
    try:
        header = next(reader)
    except StopIteration:
        raise FeatureFileError("line 1: missing header") from None
    if len(header) < 3 or header[:2] != ["id", "label"] or header != feature_header(len(header) - 2):
        raise FeatureFileError("line 1: header must be id,label,f000,f001,...")
    ncols = len(header)
    out = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != ncols:
            raise FeatureFileError(f"line {lineno}: expected {ncols} fields, got {len(row)}")
        try:
            label = int(row[1])
            feats = np.array([float(v) for v in row[2:]])
        except ValueError as exc:
            raise FeatureFileError(f"line {lineno}: non-numeric field ({exc})") from None
        if label < 0:
            raise FeatureFileError(f"line {lineno}: negative label {label}")
        if not np.all((feats >= -1e-9) & (feats <= 1 + 1e-9)):
            raise FeatureFileError(f"line {lineno}: feature outside [0, 1]")
        out.append(LabeledSample(row[0], label, feats))
    return out


def save_features(path, samples) -> int:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        return write_features(samples, fh)


def load_features(path) -> list[LabeledSample]:
    with open(path, encoding="utf-8", newline="") as fh:
        return read_features(fh)


def as_arrays(samples) -> tuple[np.ndarray, np.ndarray]:
    """Feature matrix and label vector for a list of samples."""
    samples = list(samples)
    if not samples:
        return np.zeros((0, 0)), np.zeros(0, dtype=np.int64)
    X = np.vstack([s.features for s in samples])
    y = np.array([s.label for s in samples], dtype=np.int64)
    return X, y


def dumps_features(samples) -> str:
    buf = io.StringIO()
    write_features(samples, buf)
    return buf.getvalue()
