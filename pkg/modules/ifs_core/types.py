import math
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real
from typing import Iterable, Tuple, Union

import numpy as np

from utils.errors import EmptyOrSingleton, LetterOutOfRange, OutOfRange, ValidationError
from .moran import solve_moran

logger = logging.getLogger(__name__)

Scalar = Union[float, Fraction]
Point = Tuple[Scalar, Scalar]
Word = Tuple[int, ...]


def _as_scalar(value) -> Scalar:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool) or not isinstance(value, Real):
        raise ValidationError(f"数値ではありません: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError(f"有限の数値ではありません: {value!r}")
    return value


@dataclass(frozen=True)
class Similitude:
    """回転・鏡映を含まない相似変換 x ↦ ratio·x + translation"""

    ratio: Scalar
    translation: Point

    def __post_init__(self):
        ratio = _as_scalar(self.ratio)
        if not 0 < ratio < 1:
            raise OutOfRange(f"縮小率は (0,1) の範囲である必要があります: {self.ratio}")
        translation = tuple(_as_scalar(v) for v in self.translation)
        if len(translation) != 2:
            raise ValidationError(f"平行移動は2成分である必要があります: {self.translation}")
        object.__setattr__(self, "ratio", ratio)
        object.__setattr__(self, "translation", translation)

    @property
    def is_exact(self) -> bool:
        return isinstance(self.ratio, Fraction) and all(
            isinstance(v, Fraction) for v in self.translation
        )

    @property
    def fixed_point(self) -> Point:
        return tuple(v / (1 - self.ratio) for v in self.translation)

    def apply(self, point) -> Point:
        return tuple(self.ratio * p + w for p, w in zip(point, self.translation))


@dataclass(frozen=True)
class IFS:
    """平面上の RRF 自己相似集合を生成する反復関数系"""

    maps: Tuple[Similitude, ...]
    dimension: float = field(init=False, compare=False)

    def __post_init__(self):
        maps = tuple(self.maps)
        if len(maps) < 2:
            raise EmptyOrSingleton(f"IFS には2つ以上の写像が必要です（{len(maps)}個）")
        object.__setattr__(self, "maps", maps)
        object.__setattr__(self, "dimension", solve_moran([float(m.ratio) for m in maps]))

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[Scalar, Point]]) -> "IFS":
        return cls(tuple(Similitude(ratio, translation) for ratio, translation in pairs))

    @property
    def q(self) -> int:
        return len(self.maps)

    @property
    def is_exact(self) -> bool:
        return all(m.is_exact for m in self.maps)

    @property
    def ratios(self) -> np.ndarray:
        return np.array([float(m.ratio) for m in self.maps])

    @property
    def translations(self) -> np.ndarray:
        return np.array([[float(v) for v in m.translation] for m in self.maps])

    @property
    def weights(self) -> np.ndarray:
        """自然測度の重み p_j = ρ_j^s"""
        return self.ratios ** self.dimension

    @property
    def moran_residual(self) -> float:
        return abs(math.fsum(self.weights) - 1.0)

    @property
    def fixed_points(self) -> np.ndarray:
        return self.translations / (1.0 - self.ratios)[:, None]

    def check_letter(self, letter: int) -> None:
        if not 1 <= letter <= self.q:
            raise LetterOutOfRange(f"文字 {letter} は [1, {self.q}] の範囲外です")


@dataclass(frozen=True)
class Cylinder:
    """語 ω に対応する合成写像 x ↦ ρ_ω x + t_ω"""

    word: Word
    ratio: Scalar
    translation: Point

    @classmethod
    def identity(cls) -> "Cylinder":
        return cls((), Fraction(1), (Fraction(0), Fraction(0)))

    @property
    def depth(self) -> int:
        return len(self.word)


@dataclass(frozen=True)
class Rect:
    """軸平行な長方形 [x0,x1]×[y0,y1]"""

    x0: float
    x1: float
    y0: float
    y1: float

    def __post_init__(self):
        if self.x0 > self.x1 or self.y0 > self.y1:
            raise ValidationError(f"長方形の座標が不正です: {self}")

    @classmethod
    def from_center(cls, cx: float, cy: float, width: float, height: float) -> "Rect":
        return cls(cx - width / 2, cx + width / 2, cy - height / 2, cy + height / 2)

    @property
    def width(self) -> float:
        return self.x1 - self.x0

    @property
    def height(self) -> float:
        return self.y1 - self.y0

    @property
    def diameter(self) -> float:
        return math.hypot(self.width, self.height)

    @property
    def center(self) -> Tuple[float, float]:
        return ((self.x0 + self.x1) / 2, (self.y0 + self.y1) / 2)

    def as_array(self) -> np.ndarray:
        return np.array([self.x0, self.x1, self.y0, self.y1])

    def scaled(self, ratio: float, translation) -> "Rect":
        tx, ty = (float(v) for v in translation)
        ratio = float(ratio)
        return Rect(ratio * self.x0 + tx, ratio * self.x1 + tx,
                    ratio * self.y0 + ty, ratio * self.y1 + ty)

    def inflated(self, margin: float) -> "Rect":
        return Rect(self.x0 - margin, self.x1 + margin, self.y0 - margin, self.y1 + margin)

    def contains_point(self, x: float, y: float, tol: float = 0.0) -> bool:
        return (self.x0 - tol <= x <= self.x1 + tol) and (self.y0 - tol <= y <= self.y1 + tol)

    def contains_rect(self, other: "Rect", tol: float = 0.0) -> bool:
        return (self.x0 - tol <= other.x0 and other.x1 <= self.x1 + tol
                and self.y0 - tol <= other.y0 and other.y1 <= self.y1 + tol)

    def intersects(self, other: "Rect") -> bool:
        return not (other.x1 < self.x0 or self.x1 < other.x0
                    or other.y1 < self.y0 or self.y1 < other.y0)

    def distance(self, other: "Rect") -> float:
        dx = max(0.0, other.x0 - self.x1, self.x0 - other.x1)
        dy = max(0.0, other.y0 - self.y1, self.y0 - other.y1)
        return math.hypot(dx, dy)
