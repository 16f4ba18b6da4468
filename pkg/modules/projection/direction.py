import math
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Tuple

import numpy as np

from utils.errors import ValidationError

logger = logging.getLogger(__name__)

# 軸方向の単位ベクトル（θ = kπ/2）
_AXIS_UNITS = [
    (Fraction(1), Fraction(0)),
    (Fraction(0), Fraction(1)),
    (Fraction(-1), Fraction(0)),
    (Fraction(0), Fraction(-1)),
]


def _axis_index(theta: float) -> Optional[int]:
    k = theta / (math.pi / 2)
    if k == round(k):
        return int(round(k)) % 4
    return None


@dataclass(frozen=True)
class Direction:
    """射影方向 u = (cos θ, sin θ)。軸方向では単位ベクトルを厳密値で持つ"""

    theta: float
    exact_unit: Optional[Tuple[Fraction, Fraction]] = field(default=None, compare=False)

    def __post_init__(self):
        theta = float(self.theta)
        if not math.isfinite(theta):
            raise ValidationError(f"角度が有限ではありません: {self.theta}")
        object.__setattr__(self, "theta", theta)
        index = _axis_index(theta)
        object.__setattr__(self, "exact_unit", _AXIS_UNITS[index] if index is not None else None)

    @classmethod
    def from_vector(cls, x: float, y: float) -> "Direction":
        if x == 0 and y == 0:
            raise ValidationError("零ベクトルからは方向を作れません")
        return cls(math.atan2(float(y), float(x)))

    @property
    def unit(self) -> Tuple[float, float]:
        if self.exact_unit is not None:
            return (float(self.exact_unit[0]), float(self.exact_unit[1]))
        return (math.cos(self.theta), math.sin(self.theta))

    @property
    def normal(self) -> Tuple[float, float]:
        """u⊥ = (-sin θ, cos θ)"""
        ux, uy = self.unit
        return (-uy, ux)

    @property
    def exact_normal(self) -> Optional[Tuple[Fraction, Fraction]]:
        if self.exact_unit is None:
            return None
        ux, uy = self.exact_unit
        return (-uy, ux)

    @property
    def is_axis(self) -> bool:
        return self.exact_unit is not None

    def reversed(self) -> "Direction":
        """-u（右端を左端として扱うための向きの反転）"""
        return Direction(self.theta + math.pi)

    def project(self, points: np.ndarray) -> np.ndarray:
        ux, uy = self.unit
        points = np.asarray(points, dtype=float)
        return points[..., 0] * ux + points[..., 1] * uy

    def project_normal(self, points: np.ndarray) -> np.ndarray:
        nx, ny = self.normal
        points = np.asarray(points, dtype=float)
        return points[..., 0] * nx + points[..., 1] * ny

    def __str__(self) -> str:
        return f"θ={self.theta:.6g}"
