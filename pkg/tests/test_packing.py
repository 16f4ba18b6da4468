import math

import numpy as np
import pytest

from modules.ifs_core import four_corner
from modules.projection import Direction
from modules.slicing import SliceCover, dyadic_rungs, pack_premeasure, slice_cover, validate_packing
from utils.errors import OutOfRange, ValidationError


def make_cover(intervals, resolution=0.001):
    intervals = np.array(intervals, dtype=float).reshape(-1, 2)
    return SliceCover(0.0, Direction(0.0), resolution, intervals, intervals, [], 1.0)


def test_dyadic_rungs():
    assert dyadic_rungs(0.25, 0.01) == [0.25, 0.125, 0.0625, 0.03125, 0.015625, 0.0078125]
    assert dyadic_rungs(0.3, 0.1) == [0.25, 0.125, 0.0625]
    assert dyadic_rungs(1.0, 1.0) == [1.0]


def test_far_apart_points_get_the_largest_rung():
    packing = pack_premeasure(make_cover([[0.0, 0.01], [0.5, 0.51]]), 0.25, 1.5)
    assert packing.item_count == 2
    assert packing.value == pytest.approx(1.0)
    assert packing.rung_histogram == {0.25: 2}


def test_close_points_share_the_gap():
    packing = pack_premeasure(make_cover([[0.0, 0.0], [0.1, 0.1]]), 0.25, 1.5)
    gap = 0.1 * (1 - 1e-9)
    assert packing.value == pytest.approx(2 * math.sqrt(gap))
    assert packing.strategy == "scheduled"
    assert [d for _, d in packing.items] == pytest.approx([gap, gap])
    assert packing.rung_histogram == {0.0625: 2}


def test_gap_diameters_beat_the_dyadic_rungs():
    # 3点が等間隔 0.3 に並ぶ。二進の段だけなら 0.25 を3つで 3·0.25^0.5 = 1.5
    cover = make_cover([[0.0, 0.0], [0.3, 0.3], [0.6, 0.6]])
    packing = pack_premeasure(cover, 0.3, 1.5)
    assert packing.value == pytest.approx(3 * math.sqrt(0.3), rel=1e-6)
    assert packing.value > 1.5
    assert validate_packing(packing, cover)


def test_packing_arguments():
    cover = make_cover([[0.0, 0.01]])
    with pytest.raises(ValidationError):
        pack_premeasure(cover, 0.25, 1.0)
    with pytest.raises(OutOfRange):
        pack_premeasure(cover, 0.0, 1.5)
    empty = pack_premeasure(make_cover([]), 0.25, 1.5)
    assert empty.value == 0.0
    assert empty.item_count == 0


def test_packings_of_a_real_slice_are_valid_and_monotone():
    ifs = four_corner(0.35)
    direction = Direction(1.0)
    s = ifs.dimension
    cover = slice_cover(ifs, direction, 0.6, 1 / 1024)
    values = []
    for delta in [2 ** -3, 2 ** -4, 2 ** -5, 2 ** -6]:
        packing = pack_premeasure(cover, delta, s)
        assert validate_packing(packing, cover)
        assert all(d <= delta for _, d in packing.items)
        values.append(packing.value)
    assert all(x >= y - 1e-12 for x, y in zip(values, values[1:]))


def test_validate_packing_rejects_overlaps():
    cover = make_cover([[0.0, 0.0], [0.1, 0.1]])
    packing = pack_premeasure(cover, 0.25, 1.5)
    bad = type(packing)(((0.0, 0.25), (0.1, 0.25)), 0.25, 0.5, 1.0)
    assert validate_packing(packing, cover)
    assert not validate_packing(bad, cover)


def test_packing_to_dict():
    data = pack_premeasure(make_cover([[0.0, 0.01], [0.5, 0.51]]), 0.25, 1.5).to_dict()
    assert data["rung_histogram"] == {"0.25": 2}
    assert data["item_count"] == 2
