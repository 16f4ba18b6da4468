from fractions import Fraction

import numpy as np
import pytest

from modules.projection import (
    Direction,
    ProjectedIFS,
    density_boundedness_diagnostic,
    estimate_projection_length,
    project_ifs,
    pushforward_density,
)
from modules.projection.density import _cumulative_mass
from utils.errors import OutOfRange, ValidationError


def test_uniform_projection_of_the_square(square):
    pifs = project_ifs(square, Direction(0.0))
    histogram = pushforward_density(pifs, 0.125, 8)
    assert histogram.masses == pytest.approx([0.125] * 8, abs=1e-12)
    assert histogram.sup_density == pytest.approx(1.0, abs=1e-9)
    assert histogram.edges[0] == 0.0
    assert histogram.edges[-1] == pytest.approx(1.0)


def test_total_mass_is_one(corners):
    histogram = pushforward_density(project_ifs(corners, Direction(1.0)), 0.01, 64)
    assert histogram.total_mass == pytest.approx(1.0, abs=1e-9)
    frame = histogram.to_frame()
    assert list(frame.columns) == ["bin_left", "bin_right", "mass", "density"]
    assert len(frame) == 64


def test_collapsed_projection_puts_mass_in_first_bin():
    pifs = ProjectedIFS((0.5, 0.5), (0.0, 0.0))
    histogram = pushforward_density(pifs, 0.1, 8)
    assert histogram.bin_width == pytest.approx(1 / 8)
    assert histogram.masses[0] == pytest.approx(1.0, abs=1e-12)
    assert histogram.masses[1:].sum() == 0.0


def test_density_argument_checks(corners):
    pifs = project_ifs(corners, Direction(1.0))
    with pytest.raises(OutOfRange):
        pushforward_density(pifs, 0.1, 4)
    with pytest.raises(OutOfRange):
        pushforward_density(pifs, 1.5, 16)


def test_cumulative_mass_matches_direct_sum():
    rng = np.random.default_rng(5)
    lo = rng.uniform(0, 1, size=40)
    hi = lo + rng.uniform(0, 0.2, size=40)
    hi[:5] = lo[:5]  # 点質量
    mass = rng.uniform(0.1, 1.0, size=40)
    at = np.linspace(-0.1, 1.3, 57)

    expected = []
    for x in at:
        total = 0.0
        for l, h, m in zip(lo, hi, mass):
            if h <= l:
                total += m if l <= x else 0.0
            else:
                total += m * min(1.0, max(0.0, (x - l) / (h - l)))
        expected.append(total)
    assert _cumulative_mass(lo, hi, mass, at) == pytest.approx(expected, abs=1e-12)


def test_projection_length(square, exact_corners):
    assert estimate_projection_length(project_ifs(square, Direction(0.0)), 0.01) == pytest.approx(1.0)
    cantor = project_ifs(exact_corners, Direction(0.0))
    assert estimate_projection_length(cantor, 0.3) == pytest.approx(0.6)
    assert estimate_projection_length(cantor, 0.09) == pytest.approx(0.36)


def test_projection_length_on_the_negative_axis():
    pifs = ProjectedIFS((0.4, 0.4), (-1.0, -0.4))
    a, b = pifs.extent()
    assert (a, b) == pytest.approx((-5 / 3, -2 / 3))
    assert estimate_projection_length(pifs, 0.1) == pytest.approx(8 * 0.4 ** 3)


def test_diagnostic_bounded_for_the_square(square):
    diagnostic = density_boundedness_diagnostic(project_ifs(square, Direction(0.0)), [0.05, 0.02, 0.01])
    assert diagnostic.verdict == "BoundedSuggested"
    assert len(diagnostic.to_frame()) == 3


def test_diagnostic_singular_for_cantor_projection(corners):
    diagnostic = density_boundedness_diagnostic(project_ifs(corners, Direction(0.0)),
                                                [0.05, 0.01, 0.002])
    assert diagnostic.verdict == "SingularSuggested"
    rungs = diagnostic.rungs
    assert rungs[-1]["support_length"] < rungs[0]["support_length"]


def test_diagnostic_needs_a_decreasing_ladder(corners):
    pifs = project_ifs(corners, Direction(1.0))
    with pytest.raises(ValidationError):
        density_boundedness_diagnostic(pifs, [0.05, 0.01])
    with pytest.raises(ValidationError):
        density_boundedness_diagnostic(pifs, [0.01, 0.05, 0.002])
