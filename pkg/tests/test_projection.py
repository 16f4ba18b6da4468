import math
from fractions import Fraction

import numpy as np
import pytest

from modules.ifs_core import IFS, four_corner
from modules.projection import (
    Coincidence,
    Direction,
    Fails,
    Frame,
    Holds,
    NoCoincidence,
    ProjectedIFS,
    check_condition_B,
    check_condition_B_prime,
    deduplicate_maps,
    project_ifs,
)
from utils.errors import EmptyOrSingleton, OutOfRange, ValidationError


def test_axis_directions_are_exact():
    assert Direction(0.0).exact_unit == (1, 0)
    assert Direction(math.pi / 2).unit == (0.0, 1.0)
    assert Direction(math.pi).exact_normal == (0, -1)
    assert not Direction(1.0).is_axis


def test_direction_from_vector():
    assert Direction.from_vector(0, 2).theta == pytest.approx(math.pi / 2)
    assert Direction.from_vector(1, 1).theta == pytest.approx(math.pi / 4)
    with pytest.raises(ValidationError):
        Direction.from_vector(0, 0)
    with pytest.raises(ValidationError):
        Direction(float("nan"))


def test_reversed_direction_flips_projection():
    direction = Direction(1.0)
    points = np.array([[0.2, 0.7], [1.0, -0.5]])
    assert direction.reversed().project(points) == pytest.approx(-direction.project(points))


def test_projection_offsets_are_inner_products(corners):
    direction = Direction(1.0)
    pifs = project_ifs(corners, direction)
    ux, uy = math.cos(1.0), math.sin(1.0)
    expected = [w[0] * ux + w[1] * uy for w in corners.translations]
    assert pifs.offset_array == pytest.approx(expected, abs=1e-15)
    assert pifs.ratio_array == pytest.approx([0.3] * 4)
    assert pifs.dimension == corners.dimension


def test_axis_projection_stays_exact(exact_corners):
    pifs = project_ifs(exact_corners, Direction(0.0))
    assert pifs.is_exact
    assert pifs.offsets == (0, Fraction(7, 10), 0, Fraction(7, 10))
    assert pifs.extent() == (0.0, 1.0)


def test_projection_commutes_with_maps(corners):
    direction = Direction(0.7)
    pifs = project_ifs(corners, direction)
    point = np.array([0.25, 0.6])
    for j, sim in enumerate(corners.maps):
        image = np.array(sim.apply(point), dtype=float)
        lhs = direction.project(image)
        rhs = pifs.ratio_array[j] * direction.project(point) + pifs.offset_array[j]
        assert lhs == pytest.approx(rhs, abs=1e-14)


def test_condition_B(exact_corners, corners):
    at_axis = check_condition_B(project_ifs(exact_corners, Direction(0.0)))
    assert isinstance(at_axis, Coincidence)
    assert at_axis.pairs == ((1, 3), (2, 4))
    assert not at_axis.holds
    assert isinstance(check_condition_B(project_ifs(corners, Direction(1.0))), NoCoincidence)


def test_condition_B_float_tolerance():
    ifs = four_corner(Fraction(1, 3))
    result = check_condition_B(project_ifs(ifs, Direction(math.pi / 4)))
    assert isinstance(result, Coincidence)
    assert result.pairs == ((2, 3),)


def test_condition_B_prime(exact_corners, corners, diagonal):
    assert isinstance(check_condition_B_prime(project_ifs(exact_corners, Direction(0.0))), Fails)

    both = check_condition_B_prime(project_ifs(diagonal, Direction(0.0)))
    assert isinstance(both, Holds)
    assert both.sides == ("left", "right")
    assert both.letter_for("right") == 2

    tilted = check_condition_B_prime(project_ifs(corners, Direction(0.5)))
    assert tilted.side == "left"
    assert tilted.letter_for("left") == 1


def test_condition_B_prime_right_only():
    ifs = IFS.from_pairs([(0.3, (0, 0)), (0.3, (0, 0.7)), (0.3, (0.7, 0.35))])
    result = check_condition_B_prime(project_ifs(ifs, Direction(0.0)))
    assert result.sides == ("right",)
    assert result.letters == (3,)


def test_deduplicate_maps(exact_corners):
    pifs = project_ifs(exact_corners, Direction(0.0))
    reduced = deduplicate_maps(pifs)
    assert reduced.q == 2
    assert pifs.similarity_dimension() == pytest.approx(math.log(2) / math.log(10 / 3), abs=1e-12)


def test_projected_ifs_validation():
    with pytest.raises(OutOfRange):
        ProjectedIFS((1.2,), (0.0,))
    with pytest.raises(ValidationError):
        ProjectedIFS((0.5, 0.5), (0.0,))
    with pytest.raises(EmptyOrSingleton):
        ProjectedIFS((), ())
    assert ProjectedIFS((0.5,), (0.0,)).dimension == 0.0


def test_frame_coordinates(corners):
    frame = Frame.build(corners, Direction(0.0))
    box = frame.bbox
    assert (box.x0, box.x1, box.y0, box.y1) == pytest.approx((0.0, 1.0, 0.0, 1.0))

    tilted = Frame.build(corners, Direction(1.0))
    points = np.array([[0.1, 0.9], [0.4, 0.2]])
    assert tilted.from_frame(tilted.to_frame(points)) == pytest.approx(points, abs=1e-14)
    # 回転座標でも写像は相似変換のまま
    image = np.array(corners.maps[1].apply(points[0]), dtype=float)
    expected = tilted.ratios[1] * tilted.to_frame(points[0]) + tilted.translations[1]
    assert tilted.to_frame(image) == pytest.approx(expected, abs=1e-14)
