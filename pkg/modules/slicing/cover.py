import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from config.settings import settings
from modules.ifs_core import IFS, Word, enumerate_partition
from modules.projection import Direction, Frame
from utils.intervals import merge_intervals

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SliceCover:
    """
    スライス K_t = K ∩ π^{-1}{t} の被覆（直交軸上の閉区間）

    intervals は Δ_r のうち射影が t を含むシリンダーの外接長方形を
    直交軸へ写した区間を、重なり・接触で結合したもの。
    """

    t: float
    direction: Direction
    resolution: float
    intervals: np.ndarray
    pieces: np.ndarray
    words: List[Word]
    height: float

    @property
    def is_empty(self) -> bool:
        return len(self.intervals) == 0

    @property
    def component_count(self) -> int:
        return len(self.intervals)

    @property
    def lengths(self) -> np.ndarray:
        return self.intervals[:, 1] - self.intervals[:, 0]

    @property
    def max_length(self) -> float:
        return float(self.lengths.max()) if len(self.intervals) else 0.0

    @property
    def midpoints(self) -> np.ndarray:
        return (self.intervals[:, 0] + self.intervals[:, 1]) / 2

    def contains(self, y: float, tol: float = 0.0) -> bool:
        if self.is_empty:
            return False
        i = int(np.searchsorted(self.intervals[:, 0], y, side="right")) - 1
        candidates = [k for k in (i, i + 1) if 0 <= k < len(self.intervals)]
        return any(self.intervals[k, 0] - tol <= y <= self.intervals[k, 1] + tol
                   for k in candidates)


def slice_cover(ifs: IFS, direction: Direction, t: float, r: float,
                frame: Optional[Frame] = None) -> SliceCover:
    """
    スライス K_t の分解能 r での被覆を作る

    射影が t を含まない部分木は列挙しない（子の射影は親の射影に含まれる）。

    Args:
        ifs (IFS): 反復関数系
        direction (Direction): 射影方向
        t (float): 直線上の座標
        r (float): スケール（0 < r < 1）
        frame (Optional[Frame]): 使い回す座標系（None なら作る）

    Returns:
        SliceCover: t が [a,b] の外なら空の被覆
    """
    frame = frame if frame is not None else Frame.build(ifs, direction)
    a, b = frame.extent
    lo_perp, hi_perp = frame.height_extent
    eps = settings.get_tolerance_config()["cover_slack"] * max(1.0, b - a)

    def meets_fiber(ratios: np.ndarray, translations: np.ndarray) -> np.ndarray:
        lo = translations[:, 0] + ratios * a
        hi = translations[:, 0] + ratios * b
        return (lo - eps <= t) & (t <= hi + eps)

    cylinders = enumerate_partition(frame.ratios, frame.translations, r, prune=meets_fiber)
    pieces = cylinders.intervals(lo_perp, hi_perp, axis=1)
    intervals = merge_intervals(pieces)
    logger.debug(f"スライス被覆: t={t:.6g}, r={r}, 片={len(pieces)}, 成分={len(intervals)}")
    return SliceCover(
        t=float(t),
        direction=direction,
        resolution=float(r),
        intervals=intervals,
        pieces=pieces,
        words=list(cylinders.words),
        height=hi_perp - lo_perp,
    )
