import itertools

import numpy as np
import pytest

from modules.ifs_core import (
    IFS,
    compose_word,
    enumerate_level,
    enumerate_partition,
    partition_set,
    sample_words,
    stopping_partition,
)
from utils.errors import BudgetExceeded, LetterOutOfRange, OutOfRange


@pytest.fixture
def mixed():
    return IFS.from_pairs([
        (0.5, (0.0, 0.0)),
        (0.3, (0.6, 0.1)),
        (0.2, (0.1, 0.75)),
    ])


def partition_by_recursion(ratios, r):
    """ρ_ω ≤ r < ρ_{ω⁻} を再帰で直接たどった語の集合"""
    found = set()

    def visit(word, ratio):
        for j, rho in enumerate(ratios, start=1):
            child = ratio * rho
            if child <= r:
                found.add(word + (j,))
            else:
                visit(word + (j,), child)

    visit((), 1.0)
    return found


def test_partition_matches_recursion(mixed):
    cylinders = partition_set(mixed, 0.07)
    assert set(cylinders.words) == partition_by_recursion([0.5, 0.3, 0.2], 0.07)
    assert cylinders.words == sorted(cylinders.words)


def test_partition_weights_sum_to_one(mixed):
    cylinders = partition_set(mixed, 0.01)
    assert cylinders.weights(mixed.dimension).sum() == pytest.approx(1.0, abs=1e-9)


def test_equal_ratios_stop_at_exact_scale(square):
    cylinders = partition_set(square, 0.25)
    assert len(cylinders) == 16
    assert all(len(w) == 2 for w in cylinders.words)


def test_translations_match_word_composition(mixed):
    cylinders = partition_set(mixed, 0.1)
    for word, ratio, translation in zip(cylinders.words, cylinders.ratios, cylinders.translations):
        cylinder = compose_word(word, mixed)
        assert ratio == pytest.approx(float(cylinder.ratio), rel=1e-12)
        assert translation == pytest.approx([float(v) for v in cylinder.translation], abs=1e-12)


def test_prune_removes_subtrees(corners):
    everything = partition_set(corners, 0.05)
    nothing = partition_set(corners, 0.05, prune=lambda ratios, translations: np.zeros(len(ratios), bool))
    left = partition_set(corners, 0.05, prune=lambda ratios, translations: translations[:, 0] < 0.5)
    assert len(nothing) == 0
    assert 0 < len(left) < len(everything)
    assert all(w[0] in (1, 3) for w in left.words)


def test_budget_and_range(corners):
    with pytest.raises(BudgetExceeded):
        enumerate_partition(corners.ratios, corners.translations, 0.001, budget=10)
    with pytest.raises(OutOfRange):
        partition_set(corners, 1.0)
    with pytest.raises(OutOfRange):
        partition_set(corners, 0.0)


def test_enumerate_level_is_lexicographic(corners):
    level = enumerate_level(corners.ratios, corners.translations, 3)
    assert level.words == list(itertools.product(range(1, 5), repeat=3))
    assert np.allclose(level.ratios, 0.3 ** 3)


def test_stopping_partition_returns_cylinders(exact_corners):
    cylinders = stopping_partition(exact_corners, 0.1)
    assert len(cylinders) == 16
    assert cylinders[0].word == (1, 1)
    assert cylinders[-1].word == (4, 4)


def test_compose_word_checks_letters(corners):
    with pytest.raises(LetterOutOfRange):
        compose_word((1, 5), corners)


def test_sample_words_is_seeded(corners):
    first = sample_words(corners, 10, 3, seed=7)
    assert first == sample_words(corners, 10, 3, seed=7)
    assert all(len(w) == 3 and all(1 <= j <= 4 for j in w) for w in first)
