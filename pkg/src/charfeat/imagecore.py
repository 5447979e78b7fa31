"""Image plumbing shared by every feature family.

Images are plain numpy arrays indexed ``[row, col]``: gray images are
``uint8`` arrays, binary images are ``bool`` arrays with ``True`` meaning
ink (black). Coordinates follow x = column, y = row, origin top-left,
pixel centers at integer positions.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

SIZE = 64


class PGMError(ValueError):
    """Raised for malformed, truncated or unsupported PGM payloads."""


class NoInkError(ValueError):
    """Raised when an operation needs at least one black pixel."""


class Rect(NamedTuple):
    x0: int
    y0: int
    w: int
    h: int

    @property
    def area(self) -> int:
        return self.w * self.h

    def slices(self) -> tuple[slice, slice]:
        return slice(self.y0, self.y0 + self.h), slice(self.x0, self.x0 + self.w)

    def contains(self, other: "Rect") -> bool:
        return (other.x0 >= self.x0 and other.y0 >= self.y0
                and other.x0 + other.w <= self.x0 + self.w
                and other.y0 + other.h <= self.y0 + self.h)


class Point(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class GrayImage:
    """Gray-level image as read from a PGM file.

    ``pixels`` holds raw samples in ``[0, maxval]`` (0 = dark).
    """

    pixels: np.ndarray
    maxval: int = 255

    def __post_init__(self):
        px = np.array(self.pixels, dtype=np.uint8)
        if px.ndim != 2 or px.size == 0:
            raise ValueError("GrayImage needs a non-empty 2-D array")
        if not 1 <= self.maxval <= 255:
            raise ValueError(f"unsupported maxval {self.maxval}")
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def as_8bit(self) -> np.ndarray:
        """Samples rescaled to the 0..255 range."""
        if self.maxval == 255:
            return self.pixels
        scaled = np.rint(self.pixels.astype(np.float64) * 255.0 / self.maxval)
        return scaled.astype(np.uint8)


# --------------------------------------------------------------------------
# PGM I/O
# --------------------------------------------------------------------------

_TOKEN = re.compile(rb"\S+")


def _header_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    """Read ``count`` whitespace-separated header tokens, skipping comments.

    Returns the tokens and the offset just past the last one.
    """
    tokens: list[bytes] = []
    pos = 0
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos:pos + 1].isspace():
            pos += 1
        if pos >= n:
            raise PGMError(f"truncated header at offset {pos}")
        if data[pos:pos + 1] == b"#":
            end = data.find(b"\n", pos)
            pos = n if end < 0 else end + 1
            continue
        m = _TOKEN.match(data, pos)
        tok = m.group(0)
        # a comment may start right after a token without whitespace
        hash_at = tok.find(b"#")
        if hash_at > 0:
            tok = tok[:hash_at]
        tokens.append(tok)
        pos += len(tok)
    return tokens, pos


def _header_int(tok: bytes, what: str, offset: int) -> int:
    try:
        value = int(tok)
    except ValueError:
        raise PGMError(f"non-numeric {what} {tok!r} near offset {offset}") from None
    return value


def parse_pgm(data: bytes) -> GrayImage:
    """Parse a P2 (ASCII) or P5 (binary) graymap with maxval <= 255."""
    if len(data) < 2:
        raise PGMError("truncated header at offset 0")
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise PGMError(f"bad magic {magic!r} at offset 0")
    tokens, pos = _header_tokens(data[2:], 3)
    pos += 2
    width = _header_int(tokens[0], "width", pos)
    height = _header_int(tokens[1], "height", pos)
    maxval = _header_int(tokens[2], "maxval", pos)
    if width < 1 or height < 1:
        raise PGMError(f"invalid dimensions {width}x{height} at offset {pos}")
    if not 1 <= maxval <= 255:
        raise PGMError(f"unsupported maxval {maxval} at offset {pos}")
    npix = width * height

    if magic == b"P5":
        # exactly one whitespace byte separates the header from the raster
        if pos >= len(data) or not data[pos:pos + 1].isspace():
            raise PGMError(f"missing raster separator at offset {pos}")
        start = pos + 1
        raster = data[start:start + npix]
        if len(raster) < npix:
            raise PGMError(
                f"truncated raster at offset {start + len(raster)}: "
                f"expected {npix} bytes, got {len(raster)}")
        px = np.frombuffer(raster, dtype=np.uint8)
    else:
        body = data[pos:]
        body = re.sub(rb"#[^\n]*", b" ", body)
        fields = body.split()
        if len(fields) < npix:
            raise PGMError(
                f"truncated raster at offset {len(data)}: "
                f"expected {npix} samples, got {len(fields)}")
        try:
            px = np.array([int(f) for f in fields[:npix]], dtype=np.int64)
        except ValueError:
            raise PGMError(f"non-numeric sample in raster after offset {pos}") from None
    if px.max(initial=0) > maxval or px.min(initial=0) < 0:
        raise PGMError(f"sample exceeds maxval {maxval} in raster after offset {pos}")
    return GrayImage(px.reshape(height, width).astype(np.uint8), maxval)


def serialize_pgm(img: GrayImage) -> bytes:
    """Binary P5 encoding, always with maxval 255."""
    px = img.as_8bit()
    header = b"P5\n%d %d\n255\n" % (img.width, img.height)
    return header + np.ascontiguousarray(px, dtype=np.uint8).tobytes()


def read_pgm(path) -> GrayImage:
    with open(path, "rb") as fh:
        return parse_pgm(fh.read())


def write_pgm(path, img: GrayImage) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize_pgm(img))


def mask_to_gray(mask: np.ndarray) -> GrayImage:
    """Render a binary mask as black ink (0) on white (255)."""
    return GrayImage(np.where(np.asarray(mask, dtype=bool), 0, 255).astype(np.uint8))


# --------------------------------------------------------------------------
# Thresholding and resizing
# --------------------------------------------------------------------------

def otsu_threshold(values: np.ndarray) -> int:
    """Threshold t maximizing between-class variance for the split ``v < t``.

    Ties resolve to the smallest such t. A single-valued histogram returns
    that value, so nothing falls below it.
    """
    hist = np.bincount(np.asarray(values, dtype=np.uint8).ravel(), minlength=256)
    hist = hist.astype(np.float64)
    nonzero = np.flatnonzero(hist)
    if len(nonzero) <= 1:
        return int(nonzero[0]) if len(nonzero) else 0
    levels = np.arange(256, dtype=np.float64)
    total = hist.sum()
    # class 0 for threshold t is levels [0, t)
    w0 = np.concatenate(([0.0], np.cumsum(hist)))[:256]
    s0 = np.concatenate(([0.0], np.cumsum(hist * levels)))[:256]
    w1 = total - w0
    s1 = s0[-1] + hist[-1] * 255.0 - s0
    with np.errstate(divide="ignore", invalid="ignore"):
        between = w0 * w1 * (s0 / w0 - s1 / w1) ** 2
    between[(w0 == 0) | (w1 == 0)] = -1.0
    return int(np.argmax(between))


def binarize(img: GrayImage, threshold: int | str = "otsu") -> np.ndarray:
    """Ink mask: a pixel is black iff its 8-bit intensity is below the threshold.

    ``threshold`` is ``"otsu"`` or a fixed integer in 0..255.
    """
    px = img.as_8bit()
    if threshold == "otsu":
        t = otsu_threshold(px)
    else:
        t = int(threshold)
        if not 0 <= t <= 255:
            raise ValueError(f"fixed threshold out of range: {t}")
    return px < t


def resize_to_64(arr: np.ndarray, size: int = SIZE) -> np.ndarray:
    """Anisotropic nearest-neighbour resample to ``size`` x ``size``.

    Works on binary masks and gray arrays alike; output pixel j samples
    source index ``floor(j * n_src / size)``.
    """
    arr = np.asarray(arr)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError("cannot resize an empty image")
    h, w = arr.shape
    rows = (np.arange(size) * h) // size
    cols = (np.arange(size) * w) // size
    return arr[np.ix_(rows, cols)]


def preprocess(img: GrayImage, threshold: int | str = "otsu") -> np.ndarray:
    """Scale a gray image to 64x64 first, then threshold it."""
    scaled = GrayImage(resize_to_64(img.pixels), img.maxval)
    return binarize(scaled, threshold)


# --------------------------------------------------------------------------
# Geometry
# --------------------------------------------------------------------------

def ink_bbox(img: np.ndarray) -> Rect:
    ys, xs = np.nonzero(img)
    if len(xs) == 0:
        raise NoInkError("image has no black pixels")
    x0, y0 = int(xs.min()), int(ys.min())
    return Rect(x0, y0, int(xs.max()) - x0 + 1, int(ys.max()) - y0 + 1)


def _pad_axis(lo: int, extent: int, side: int, limit: int) -> int:
    pad = side - extent
    start = lo - (pad + 1) // 2
    return min(max(start, 0), limit - side)


def bounding_square(img: np.ndarray) -> Rect:
    """Minimal square around the ink, centred on its bounding box.

    Odd padding puts the extra pixel on the low side; the square is then
    shifted to lie inside the image.
    """
    bb = ink_bbox(img)
    side = max(bb.w, bb.h)
    h, w = img.shape
    x0 = _pad_axis(bb.x0, bb.w, side, w)
    y0 = _pad_axis(bb.y0, bb.h, side, h)
    return Rect(x0, y0, side, side)


def center_of_gravity(img: np.ndarray, region: Rect, denominator: str = "ink") -> Point:
    """Mean coordinate of the black pixels inside ``region``.

    An ink-free region returns its geometric center. ``denominator="area"``
    divides the coordinate sums by the region area instead of the ink count
    (the literal 1/mn normalisation), kept for comparison only.
    """
    block = img[region.slices()]
    ys, xs = np.nonzero(block)
    if len(xs) == 0:
        return Point(region.x0 + (region.w - 1) / 2, region.y0 + (region.h - 1) / 2)
    if denominator == "ink":
        n = len(xs)
    elif denominator == "area":
        n = region.area
    else:
        raise ValueError(f"unknown denominator {denominator!r}")
    sx = float(xs.sum()) + region.x0 * len(xs)
    sy = float(ys.sum()) + region.y0 * len(ys)
    return Point(sx / n, sy / n)
