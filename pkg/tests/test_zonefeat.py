import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from charfeat.imagecore import Rect
from charfeat.zonefeat import (
    centroid_features,
    distance_features,
    octant_counts,
    octant_frame,
    octant_frame_for,
    octant_map,
    shadow_features,
)
from conftest import binary_images
from oracles import distance_oracle, octant_segments, shadow_oracle

FULL = Rect(0, 0, 64, 64)


def angle_octant(u2, v2):
    """Octant from the polar angle; boundary rays go to the lower index."""
    if u2 == 0 and v2 == 0:
        return 0
    theta = math.atan2(v2, u2) % (2 * math.pi)
    k = int(theta // (math.pi / 4))
    on_ray = u2 == 0 or v2 == 0 or abs(u2) == abs(v2)
    if on_ray:
        k = round(theta / (math.pi / 4)) % 8
        return 0 if k == 0 else k - 1
    return k


def octants_by_angle(s):
    lab = np.zeros((s, s), dtype=int)
    for y in range(s):
        for x in range(s):
            lab[y, x] = angle_octant(2 * x - (s - 1), (s - 1) - 2 * y)
    return lab


# -- frame ------------------------------------------------------------------

def test_frame_geometry_side_64():
    frame = octant_frame(np.ones((64, 64), bool))
    for sides in frame.sides:
        outer, axis, halfdiag = sides
        assert outer.length == pytest.approx(32)
        assert axis.length == pytest.approx(32)
        assert halfdiag.length == pytest.approx(32 * math.sqrt(2))
    assert len(frame.sides) * 3 == 24


def test_octant_zero_is_east_to_northeast():
    frame = octant_frame_for(FULL)
    lab = octant_map(frame)
    assert lab[20, 60] == 0   # right of center, a little above
    assert lab[2, 40] == 1    # above, slightly right
    assert lab[2, 20] == 2
    assert lab[30, 2] == 3
    assert lab[34, 2] == 4
    assert lab[60, 20] == 5
    assert lab[60, 40] == 6
    assert lab[40, 60] == 7


@pytest.mark.parametrize("s", [1, 2, 5, 8, 13, 64])
def test_octant_labels_match_angle_classifier(s):
    assert np.array_equal(octant_map(octant_frame_for(Rect(0, 0, s, s))), octants_by_angle(s))


def test_tie_break_on_midlines():
    lab = octant_map(octant_frame_for(Rect(0, 0, 5, 5)))  # center pixel (2, 2)
    assert lab[2, 2] == 0
    assert lab[0, 2] == 1 and lab[4, 2] == 5   # vertical midline
    assert lab[2, 4] == 0 and lab[2, 0] == 3   # horizontal midline
    assert lab[0, 4] == 0 and lab[0, 0] == 2   # NE and NW diagonals
    assert lab[4, 0] == 4 and lab[4, 4] == 6   # SW and SE diagonals


@given(binary_images(min_ink=1))
def test_octant_counts_partition_ink(img):
    frame = octant_frame(img)
    sq = frame.square
    assert octant_counts(img, frame).sum() == img[sq.slices()].sum() == img.sum()
    assert set(np.unique(octant_map(frame))) <= set(range(8))


# -- shadows ----------------------------------------------------------------

def _oracle(img, frame):
    sq = frame.square
    return np.array(shadow_oracle(img.tolist(), tuple(sq), octant_segments(sq.x0, sq.y0, sq.w)))


def test_shadow_blank_square_is_zero():
    img = np.zeros((64, 64), bool)
    assert not shadow_features(img, octant_frame_for(FULL)).any()


def test_shadow_full_occlusion():
    img = np.ones((64, 64), bool)
    assert np.array_equal(shadow_features(img, octant_frame(img)), np.ones(24))


def test_shadow_pixel_next_to_center():
    # even square: pixel (32, 31) touches the center point and is cut by the NE diagonal
    img = np.zeros((64, 64), bool)
    img[31, 32] = True
    frame = octant_frame_for(FULL)
    got = shadow_features(img, frame).reshape(8, 3)
    lit = [k for k in range(8) if got[k].any()]
    assert lit == [0, 1]
    assert np.array_equal(got.ravel(), _oracle(img, frame))
    # axis and outer edge cells are 1 px wide; the half diagonal gets the
    # pixel's sqrt(2)-long projection across two cells
    assert got[0].tolist() == [1 / 32, 1 / 32, 2 / 46]


def test_shadow_odd_square_center_pixel():
    img = np.zeros((64, 64), bool)
    img[10, 10] = True
    frame = octant_frame_for(Rect(0, 0, 21, 21))
    got = shadow_features(img, frame).reshape(8, 3)
    # the center pixel overlaps all eight triangles, half a cell on each axis side
    assert np.array_equal(got.ravel(), _oracle(img, frame))
    assert (got[:, 1] == 1 / 11).all()


def test_shadow_matches_clipping_oracle():
    rng = np.random.default_rng(7)
    for _ in range(25):
        img = np.zeros((64, 64), bool)
        x, y = rng.integers(0, 40, size=2)
        w, h = rng.integers(3, 24, size=2)
        img[y:y + h, x:x + w] = rng.random((h, w)) < rng.uniform(0.05, 0.5)
        if not img.any():
            continue
        frame = octant_frame(img)
        assert np.array_equal(shadow_features(img, frame), _oracle(img, frame))


@given(binary_images(min_ink=1), st.integers(0, 63), st.integers(0, 63))
def test_shadow_monotone_in_ink(img, x, y):
    frame = octant_frame(img)
    more = img.copy()
    more[y, x] = True
    if octant_frame(more).square != frame.square:
        return  # a new pixel that moves the square changes the frame itself
    assert (shadow_features(more, frame) >= shadow_features(img, frame)).all()


def _symmetric_case(rng):
    """Ink in a fixed 40x40 square at (12, 12), none on the diagonals.

    Even sides keep the midlines between pixels, and with the diagonals
    clear no pixel sits on a dividing ray, so tie-breaks play no part.
    """
    block = rng.random((40, 40)) < 0.15
    idx = np.arange(40)
    block[idx, idx] = block[idx, 39 - idx] = False
    for y, x in [(8, 0), (18, 39), (0, 13), (39, 18)]:  # pin all four edges
        block[y, x] = True
    img = np.zeros((64, 64), bool)
    img[12:52, 12:52] = block
    return img


def test_rotation_permutes_octants():
    rng = np.random.default_rng(3)
    perm = [(k + 4) % 8 for k in range(8)]
    for _ in range(20):
        img = _symmetric_case(rng)
        rot = img[::-1, ::-1]
        f, fr = octant_frame(img), octant_frame(rot)
        assert f.square == fr.square == Rect(12, 12, 40, 40)
        sh, shr = shadow_features(img, f).reshape(8, 3), shadow_features(rot, fr).reshape(8, 3)
        assert np.array_equal(shr[perm], sh)
        c, cr = centroid_features(img, f).reshape(8, 2), centroid_features(rot, fr).reshape(8, 2)
        # in pixel-index units a half turn maps x to (side - 1) - x
        assert np.allclose(cr[perm], 39 / 40 - c, rtol=0, atol=1e-12)


# -- centroids --------------------------------------------------------------

def test_centroid_full_fill_equals_default():
    img = np.ones((64, 64), bool)
    frame = octant_frame(img)
    got = centroid_features(img, frame).reshape(8, 2)
    lab = octants_by_angle(64)
    ys, xs = np.indices((64, 64))
    want = np.array([[xs[lab == k].mean() / 64, ys[lab == k].mean() / 64] for k in range(8)])
    assert np.allclose(got, want, atol=1e-15)
    blank = centroid_features(np.zeros((64, 64), bool), frame).reshape(8, 2)
    assert np.array_equal(blank, got)


def test_centroid_single_pixel():
    img = np.zeros((64, 64), bool)
    img[16, 48] = True
    frame = octant_frame_for(FULL)
    got = centroid_features(img, frame).reshape(8, 2)
    default = centroid_features(np.ones((64, 64), bool), frame).reshape(8, 2)
    assert got[0].tolist() == [0.75, 0.25]
    assert np.array_equal(got[1:], default[1:])


@given(binary_images(min_ink=1))
def test_zone_features_in_unit_interval(img):
    frame = octant_frame(img)
    for v in (shadow_features(img, frame), centroid_features(img, frame), distance_features(img)):
        assert ((v >= 0) & (v <= 1)).all()


def test_centroid_tiny_square_defaults_clipped():
    img = np.zeros((64, 64), bool)
    img[5, 5] = True
    v = centroid_features(img, octant_frame(img))
    assert ((v >= 0) & (v <= 1)).all()
    assert v[:2].tolist() == [0.0, 0.0]


# -- distances --------------------------------------------------------------

def test_distance_blank_and_full():
    assert not distance_features(np.zeros((64, 64), bool)).any()
    assert not distance_features(np.ones((64, 64), bool)).any()


def test_distance_column_at_31():
    img = np.zeros((64, 64), bool)
    img[:, 31] = True
    got = distance_features(img).reshape(4, 2)
    want = np.array(distance_oracle(img)).reshape(4, 2)
    assert got[0, 0] == got[2, 0] == 31 / 32
    assert got[1, 0] == got[3, 0] == 0
    # NW diagonals starting on the top border reach column 31 after 31 - x steps;
    # the longest clean run starts at the corner (0, 0)
    assert got[0, 1] == got[2, 1] == 31 / 32
    assert np.array_equal(got, want)


def test_distance_matches_scanline_oracle():
    rng = np.random.default_rng(11)
    for _ in range(500):
        img = rng.random((64, 64)) < rng.choice([0.0005, 0.002, 0.01, 0.05])
        assert np.array_equal(distance_features(img), distance_oracle(img))
