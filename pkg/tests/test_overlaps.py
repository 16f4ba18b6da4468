import itertools
import math
from fractions import Fraction

import pytest

from modules.ifs_core import four_corner
from modules.projection import Direction, ProjectedIFS, detect_exact_overlaps, project_ifs
from utils.errors import BudgetExceeded, OutOfRange


def all_coincidences(pifs, depth):
    """全ての語の組を直接比べる参照実装（厳密な IFS 用）"""
    maps = {}
    for length in range(1, depth + 1):
        for word in itertools.product(range(1, pifs.q + 1), repeat=length):
            rho, c = Fraction(1), Fraction(0)
            for j in word:
                c, rho = c + rho * pifs.offsets[j - 1], rho * pifs.ratios[j - 1]
            maps[word] = (rho, c)
    words = sorted(maps, key=lambda w: (len(w), w))
    return {
        (u, v)
        for i, u in enumerate(words)
        for v in words[i + 1:]
        if maps[u] == maps[v]
    }


@pytest.fixture
def halving():
    """φ₁φ₁ = φ₃ かつ φ₁φ₃ = φ₃φ₁ となる直線上の系"""
    half, quarter = Fraction(1, 2), Fraction(1, 4)
    return ProjectedIFS((half, half, quarter), (Fraction(0), half, Fraction(0)))


def test_duplicate_maps_of_product_set(cantor_product):
    pifs = project_ifs(cantor_product, Direction(0.0))
    assert pifs.is_exact
    assert detect_exact_overlaps(pifs, 1) == [((1,), (3,)), ((2,), (4,))]
    # 長い一致は全て最初の一致から来るので最小の組は増えない
    assert detect_exact_overlaps(pifs, 3) == [((1,), (3,)), ((2,), (4,))]


def test_non_minimal_pairs_match_brute_force(cantor_product):
    pifs = project_ifs(cantor_product, Direction(0.0))
    pairs = detect_exact_overlaps(pifs, 2, minimal=False)
    assert set(pairs) == all_coincidences(pifs, 2)
    assert len(pairs) == 2 + 24


def test_overlaps_of_different_lengths(halving):
    assert detect_exact_overlaps(halving, 2) == [((3,), (1, 1)), ((1, 3), (3, 1))]
    assert set(detect_exact_overlaps(halving, 3, minimal=False)) == all_coincidences(halving, 3)


def test_float_overlaps_within_tolerance():
    pifs = project_ifs(four_corner(Fraction(1, 3)), Direction(math.pi / 4))
    assert not pifs.is_exact
    assert detect_exact_overlaps(pifs, 1) == [((2,), (3,))]


def test_generic_direction_has_no_overlaps(corners):
    assert detect_exact_overlaps(project_ifs(corners, Direction(1.0)), 3) == []


def test_depth_and_budget(corners):
    pifs = project_ifs(corners, Direction(1.0))
    with pytest.raises(OutOfRange):
        detect_exact_overlaps(pifs, 0)
    with pytest.raises(BudgetExceeded):
        detect_exact_overlaps(pifs, 4, budget=100)
