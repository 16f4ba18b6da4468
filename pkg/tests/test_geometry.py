import math

import numpy as np
import pytest

from modules.ifs_core import (
    NotSeparatedAtDepth,
    Rect,
    Separated,
    attractor_bbox,
    check_strong_separation,
    measure_separation_constant,
    sample_natural_measure,
)
from utils.errors import OutOfRange, ValidationError


def test_attractor_bbox(corners, diagonal):
    assert attractor_bbox(corners) == Rect(0.0, 1.0, 0.0, 1.0)
    box = attractor_bbox(diagonal)
    assert (box.x0, box.x1) == pytest.approx((0.0, 1.0))


def test_separation_of_four_corners(corners):
    result = check_strong_separation(corners, 4)
    assert isinstance(result, Separated)
    assert result.depth == 1
    assert result.gap == pytest.approx(0.4, abs=1e-12)


def test_separation_of_diagonal_pair(diagonal):
    result = check_strong_separation(diagonal, 4)
    assert isinstance(result, Separated)
    assert result.gap == pytest.approx(math.hypot(0.2, 0.2), abs=1e-12)


def test_full_square_is_not_separated(square):
    result = check_strong_separation(square, 2)
    assert isinstance(result, NotSeparatedAtDepth)
    assert result.depth == 2
    assert result.distance == 0.0


def test_separation_depth_must_be_positive(corners):
    with pytest.raises(OutOfRange):
        check_strong_separation(corners, 0)


def test_separation_constant_is_positive(corners):
    gamma = measure_separation_constant(corners, 0.05, n_pairs=200, seed=1)
    assert gamma > 0


def test_natural_measure_samples_stay_in_bbox(corners):
    points = sample_natural_measure(corners, 500, seed=3)
    assert points.shape == (500, 2)
    assert np.all((points >= -1e-12) & (points <= 1 + 1e-12))
    assert np.array_equal(points, sample_natural_measure(corners, 500, seed=3))
    with pytest.raises(OutOfRange):
        sample_natural_measure(corners, 0, seed=3)


def test_rect_validation_and_helpers():
    with pytest.raises(ValidationError):
        Rect(1.0, 0.0, 0.0, 1.0)
    outer = Rect(0, 2, 0, 2)
    inner = Rect.from_center(1, 1, 1, 1)
    assert outer.contains_rect(inner)
    assert outer.intersects(Rect(2, 3, 0, 1))
    assert Rect(0, 1, 0, 1).distance(Rect(2, 3, 0, 1)) == 1.0
