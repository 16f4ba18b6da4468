from fractions import Fraction

import pytest

from modules.ifs_core import diagonal_pair, four_corner, full_square, product_cantor


@pytest.fixture(autouse=True)
def isolated_settings(monkeypatch, tmp_path):
    """出力先とログファイルをテストごとに切り離す"""
    monkeypatch.setenv("FRACTAL_SLICER_OUTPUT_DIR", str(tmp_path / "output"))
    monkeypatch.setenv("FRACTAL_SLICER_LOG_FILE", "")
    monkeypatch.delenv("FRACTAL_SLICER_BUDGET", raising=False)
    monkeypatch.setenv("FRACTAL_SLICER_THREADS", "2")


@pytest.fixture
def corners():
    return four_corner(0.3)


@pytest.fixture
def exact_corners():
    return four_corner(Fraction(3, 10))


@pytest.fixture
def cantor_product():
    return product_cantor(Fraction(2, 5), Fraction(3, 5))


@pytest.fixture
def diagonal():
    return diagonal_pair(0.4)


@pytest.fixture
def square():
    return full_square()
