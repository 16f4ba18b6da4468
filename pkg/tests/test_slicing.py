import itertools
import math

import numpy as np
import pytest

from modules.ifs_core import compose_word, four_corner, sample_natural_measure
from modules.projection import Direction, Frame
from modules.slicing import (
    SliceCover,
    box_dimension_slice,
    hausdorff_content_slice,
    slice_cover,
)
from utils.errors import ValidationError


def cover_by_brute_force(ifs, direction, t, depth):
    """長さ depth の全ての語の外接長方形を回転座標で調べ、素朴に結合する"""
    frame = Frame.build(ifs, direction)
    a, b = frame.extent
    lo, hi = frame.height_extent
    pieces = []
    for word in itertools.product(range(1, ifs.q + 1), repeat=depth):
        cylinder = compose_word(word, ifs)
        rho = float(cylinder.ratio)
        point = np.array([float(v) for v in cylinder.translation])
        along, across = direction.project(point), direction.project_normal(point)
        if along + rho * a - 1e-12 <= t <= along + rho * b + 1e-12:
            pieces.append((across + rho * lo, across + rho * hi))
    merged = []
    for start, end in sorted(pieces):
        if merged and start <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], end)
        else:
            merged.append([start, end])
    return np.array(merged).reshape(-1, 2)


def test_vertical_slice_of_the_square(square):
    cover = slice_cover(square, Direction(0.0), 0.3, 0.125)
    assert cover.component_count == 1
    assert cover.intervals[0] == pytest.approx([0.0, 1.0])
    assert cover.contains(0.5)
    assert not cover.contains(1.5)


def test_slice_outside_the_projection_is_empty(corners):
    cover = slice_cover(corners, Direction(0.0), 2.0, 0.1)
    assert cover.is_empty
    assert cover.max_length == 0.0
    assert not cover.contains(0.0)


def test_slice_can_fall_into_a_gap(corners):
    assert slice_cover(corners, Direction(0.0), 0.15, 0.3).component_count == 2
    assert slice_cover(corners, Direction(0.0), 0.15, 0.09).is_empty
    assert slice_cover(corners, Direction(0.0), 0.05, 0.09).component_count == 4


def test_cover_matches_brute_force():
    ifs = four_corner(0.35)
    direction = Direction(1.0)
    for point in sample_natural_measure(ifs, 5, seed=11):
        t = float(direction.project(point))
        cover = slice_cover(ifs, direction, t, 0.05)
        expected = cover_by_brute_force(ifs, direction, t, 3)
        assert not cover.is_empty
        assert cover.intervals == pytest.approx(expected, abs=1e-12)


def test_box_dimension_of_a_cantor_slice(corners):
    estimate = box_dimension_slice(corners, Direction(0.0), 0.0, [0.1, 0.03, 0.01, 0.003])
    assert estimate.counts == [4, 8, 16, 32]
    assert 0.5 < estimate.slope < 0.7
    assert not estimate.is_empty


def test_box_dimension_of_empty_and_full_slices(corners, square):
    empty = box_dimension_slice(corners, Direction(0.0), 2.0, [0.1, 0.05, 0.02, 0.01])
    assert empty.is_empty
    assert empty.slope == 0.0
    full = box_dimension_slice(square, Direction(0.0), 0.3, [0.1, 0.05, 0.02, 0.01])
    assert full.counts == [1, 1, 1, 1]
    assert full.slope == pytest.approx(0.0, abs=1e-12)


def test_box_dimension_ladder_checks(corners):
    with pytest.raises(ValidationError):
        box_dimension_slice(corners, Direction(0.0), 0.0, [0.1, 0.05, 0.02])
    with pytest.raises(ValidationError):
        box_dimension_slice(corners, Direction(0.0), 0.0, [0.1, 0.05, 0.05, 0.01])
    with pytest.raises(ValidationError):
        box_dimension_slice(corners, Direction(0.0), 0.0, [1.5, 0.05, 0.02, 0.01])


def make_cover(intervals, resolution=0.001):
    intervals = np.array(intervals, dtype=float).reshape(-1, 2)
    return SliceCover(0.0, Direction(0.0), resolution, intervals, intervals, [], 1.0)


def test_hausdorff_content():
    cover = make_cover([[0.0, 0.01], [0.5, 0.54]])
    assert hausdorff_content_slice(cover, 0.5) == pytest.approx(math.sqrt(0.01) + math.sqrt(0.04))
    assert hausdorff_content_slice(make_cover([]), 0.5) == 0.0
    with pytest.raises(ValidationError):
        hausdorff_content_slice(cover, 0.0)


def test_finer_pieces_lie_inside_coarser_components():
    ifs = four_corner(0.35)
    direction = Direction(1.0)
    frame = Frame.build(ifs, direction)
    for point in sample_natural_measure(ifs, 5, seed=7):
        t = float(direction.project(point))
        coarse = slice_cover(ifs, direction, t, 0.02, frame=frame)
        fine = slice_cover(ifs, direction, t, 0.005, frame=frame)
        assert fine.component_count >= 1
        starts = coarse.intervals[:, 0]
        for lo, hi in fine.pieces:
            i = int(np.searchsorted(starts, lo + 1e-12, side="right")) - 1
            assert i >= 0
            assert coarse.intervals[i, 0] - 1e-12 <= lo
            assert hi <= coarse.intervals[i, 1] + 1e-12
