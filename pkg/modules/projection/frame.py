from dataclasses import dataclass
from typing import Tuple

import numpy as np

from modules.ifs_core import IFS, Rect
from .direction import Direction
from .projected_ifs import ProjectedIFS, project_ifs, project_onto


@dataclass(frozen=True, eq=False)
class Frame:
    """
    方向 u に合わせた座標系 (⟨x,u⟩, ⟨x,u⊥⟩)

    回転は IFS と可換なので、この座標でも写像は x ↦ ρ_j x + (c_j, c⊥_j)。
    スライス π_u^{-1}(t) は along 座標 = t の縦線になる。
    """

    ifs: IFS
    direction: Direction
    along: ProjectedIFS
    across: ProjectedIFS

    @classmethod
    def build(cls, ifs: IFS, direction: Direction) -> "Frame":
        along = project_ifs(ifs, direction)
        across = project_onto(ifs, direction.normal, direction.exact_normal)
        return cls(ifs, direction, along, across)

    @property
    def extent(self) -> Tuple[float, float]:
        """[a, b]：射影アトラクタの凸包"""
        return self.along.extent()

    @property
    def height_extent(self) -> Tuple[float, float]:
        """[a⊥, b⊥]：直交方向の凸包"""
        return self.across.extent()

    @property
    def height(self) -> float:
        lo, hi = self.height_extent
        return hi - lo

    @property
    def bbox(self) -> Rect:
        """回転座標でのアトラクタの外接長方形"""
        a, b = self.extent
        lo, hi = self.height_extent
        return Rect(a, b, lo, hi)

    @property
    def ratios(self) -> np.ndarray:
        return self.along.ratio_array

    @property
    def translations(self) -> np.ndarray:
        return np.column_stack([self.along.offset_array, self.across.offset_array])

    def to_frame(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        return np.stack([self.direction.project(points),
                         self.direction.project_normal(points)], axis=-1)

    def from_frame(self, coords: np.ndarray) -> np.ndarray:
        coords = np.asarray(coords, dtype=float)
        (ux, uy), (nx, ny) = self.direction.unit, self.direction.normal
        x = coords[..., 0] * ux + coords[..., 1] * nx
        y = coords[..., 0] * uy + coords[..., 1] * ny
        return np.stack([x, y], axis=-1)
