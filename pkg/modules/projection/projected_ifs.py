import math
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from config.settings import settings
from modules.ifs_core import IFS, solve_moran
from modules.ifs_core.types import Scalar, _as_scalar
from utils.errors import EmptyOrSingleton, OutOfRange, ValidationError
from .direction import Direction

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ProjectedIFS:
    """
    直線上の IFS {x ↦ ρ_j x + c_j}

    dimension は元の平面 IFS の s をそのまま持つ（重み p_j = ρ_j^s が
    射影測度の自己相似性を与えるため）。重複写像を除いた後の相似次元は
    similarity_dimension() で別に求める。
    """

    ratios: Tuple[Scalar, ...]
    offsets: Tuple[Scalar, ...]
    dimension: float = field(default=None)

    def __post_init__(self):
        ratios = tuple(_as_scalar(v) for v in self.ratios)
        offsets = tuple(_as_scalar(v) for v in self.offsets)
        if len(ratios) == 0:
            raise EmptyOrSingleton("射影 IFS には1つ以上の写像が必要です")
        if len(ratios) != len(offsets):
            raise ValidationError(f"縮小率と平行移動の個数が一致しません: {len(ratios)} != {len(offsets)}")
        for rho in ratios:
            if not 0 < rho < 1:
                raise OutOfRange(f"縮小率は (0,1) の範囲である必要があります: {rho}")
        object.__setattr__(self, "ratios", ratios)
        object.__setattr__(self, "offsets", offsets)
        if self.dimension is None:
            object.__setattr__(self, "dimension", similarity_dimension_of(ratios))

    @classmethod
    def from_maps(cls, ratios: Sequence[Scalar], offsets: Sequence[Scalar],
                  dimension: Optional[float] = None) -> "ProjectedIFS":
        return cls(tuple(ratios), tuple(offsets), dimension)

    @property
    def q(self) -> int:
        return len(self.ratios)

    @property
    def is_exact(self) -> bool:
        return all(isinstance(v, Fraction) for v in self.ratios + self.offsets)

    @property
    def ratio_array(self) -> np.ndarray:
        return np.array([float(v) for v in self.ratios])

    @property
    def offset_array(self) -> np.ndarray:
        return np.array([float(v) for v in self.offsets])

    @property
    def weights(self) -> np.ndarray:
        return self.ratio_array ** self.dimension

    @property
    def fixed_points(self) -> Tuple[Scalar, ...]:
        """固定点 c_j/(1-ρ_j)（厳密な IFS では Fraction）"""
        return tuple(c / (1 - rho) for rho, c in zip(self.ratios, self.offsets))

    def extent(self) -> Tuple[float, float]:
        a, b = attractor_extent(self)
        return float(a), float(b)

    def similarity_dimension(self) -> float:
        """重複写像を除いた系の相似次元"""
        return deduplicate_maps(self).dimension


def similarity_dimension_of(ratios: Sequence[Scalar]) -> float:
    """Moran 方程式の解（写像が1つなら次元0）"""
    if len(ratios) == 1:
        return 0.0
    return solve_moran([float(v) for v in ratios])


def _dot(point, unit, exact_unit):
    if exact_unit is not None and all(isinstance(v, Fraction) for v in point):
        return point[0] * exact_unit[0] + point[1] * exact_unit[1]
    if exact_unit is not None:
        # 軸方向なら片方の成分がそのまま残る
        return float(point[0]) * float(exact_unit[0]) + float(point[1]) * float(exact_unit[1])
    return math.fsum([float(point[0]) * unit[0], float(point[1]) * unit[1]])


def project_onto(ifs: IFS, unit: Tuple[float, float],
                 exact_unit: Optional[Tuple[Fraction, Fraction]] = None) -> ProjectedIFS:
    offsets = tuple(_dot(m.translation, unit, exact_unit) for m in ifs.maps)
    ratios = tuple(m.ratio for m in ifs.maps)
    if not all(isinstance(v, Fraction) for v in offsets):
        ratios = tuple(float(v) for v in ratios)
        offsets = tuple(float(v) for v in offsets)
    return ProjectedIFS(ratios, offsets, ifs.dimension)


def project_ifs(ifs: IFS, direction: Direction) -> ProjectedIFS:
    """
    方向 u への射影 π_u(x) = ⟨x, u⟩ による1次元 IFS

    π_u ∘ ψ_j = φ_j ∘ π_u、φ_j(x) = ρ_j x + ⟨w_j, u⟩ が成り立つ。

    Args:
        ifs (IFS): 平面の反復関数系
        direction (Direction): 射影方向

    Returns:
        ProjectedIFS: 縮小率はそのまま、平行移動 c_j = ⟨w_j, u⟩
    """
    pifs = project_onto(ifs, direction.unit, direction.exact_unit)
    logger.debug(f"射影 IFS を作成しました: {direction}, c={pifs.offsets}")
    return pifs


def attractor_extent(pifs: ProjectedIFS) -> Tuple[Scalar, Scalar]:
    """射影アトラクタの凸包 [a,b]（a = 最小の固定点、b = 最大の固定点）"""
    fixed = pifs.fixed_points
    return min(fixed), max(fixed)


def deduplicate_maps(pifs: ProjectedIFS, tol: Optional[float] = None) -> ProjectedIFS:
    """
    一致する写像 (ρ,c) を1つにまとめた射影 IFS（最初に現れたものを残す）

    次元は重複を除いた縮小率で解き直す。

    Args:
        pifs (ProjectedIFS): 射影 IFS
        tol (Optional[float]): 一致判定の許容誤差（None なら設定値）

    Returns:
        ProjectedIFS: 重複のない射影 IFS
    """
    if tol is None:
        tol = 0.0 if pifs.is_exact else settings.get_tolerance_config()["coincidence_tol"]
    kept: List[Tuple[Scalar, Scalar]] = []
    for rho, c in zip(pifs.ratios, pifs.offsets):
        if any(abs(rho - r0) <= tol and abs(c - c0) <= tol for r0, c0 in kept):
            continue
        kept.append((rho, c))
    if len(kept) < pifs.q:
        logger.info(f"重複写像を {pifs.q - len(kept)} 個除きました")
    return ProjectedIFS([r for r, _ in kept], [c for _, c in kept])
