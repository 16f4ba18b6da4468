import math
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
from scipy import stats

from modules.ifs_core import IFS
from modules.projection import Direction, Frame
from utils.errors import ValidationError
from .cover import SliceCover, slice_cover

logger = logging.getLogger(__name__)


@dataclass
class SliceDimensionEstimate:
    t: float
    slope: float
    intercept: float
    residual: float
    r_ladder: List[float]
    counts: List[int]

    @property
    def is_empty(self) -> bool:
        return all(c == 0 for c in self.counts)

    def to_dict(self):
        return {
            "t": self.t,
            "slope": self.slope,
            "intercept": self.intercept,
            "residual": self.residual,
            "r_ladder": self.r_ladder,
            "counts": self.counts,
        }


def _validate_ladder(r_ladder: Sequence[float], min_rungs: int) -> List[float]:
    ladder = [float(r) for r in r_ladder]
    if len(ladder) < min_rungs:
        raise ValidationError(f"r_ladder は{min_rungs}段以上が必要です: {ladder}")
    if any(not 0 < r < 1 for r in ladder):
        raise ValidationError(f"r_ladder の各値は (0,1) にある必要があります: {ladder}")
    if any(x <= y for x, y in zip(ladder, ladder[1:])):
        raise ValidationError(f"r_ladder は狭義単調減少である必要があります: {ladder}")
    return ladder


def box_dimension_slice(ifs: IFS, direction: Direction, t: float, r_ladder: Sequence[float],
                        frame: Optional[Frame] = None) -> SliceDimensionEstimate:
    """
    スライス被覆の成分数 N(r) から log N(r) / log(1/r) の傾きを最小二乗で求める

    成分数が正の段が2つ未満なら傾き0（空のスライスを含む）。

    Args:
        ifs (IFS): 反復関数系
        direction (Direction): 射影方向
        t (float): スライスの位置
        r_ladder (Sequence[float]): 狭義単調減少な4段以上のスケール
        frame (Optional[Frame]): 使い回す座標系

    Returns:
        SliceDimensionEstimate: 傾き・切片・残差（RMS）と各段の成分数
    """
    ladder = _validate_ladder(r_ladder, 4)
    frame = frame if frame is not None else Frame.build(ifs, direction)
    counts = [slice_cover(ifs, direction, t, r, frame=frame).component_count for r in ladder]

    positive = [(r, n) for r, n in zip(ladder, counts) if n > 0]
    if len(positive) < 2:
        return SliceDimensionEstimate(float(t), 0.0, 0.0, 0.0, ladder, counts)

    x = np.array([math.log(1.0 / r) for r, _ in positive])
    y = np.array([math.log(n) for _, n in positive])
    fit = stats.linregress(x, y)
    residual = float(np.sqrt(np.mean((y - (fit.intercept + fit.slope * x)) ** 2)))
    logger.debug(f"スライス次元: t={t:.6g}, 傾き={fit.slope:.4f}, 成分数={counts}")
    return SliceDimensionEstimate(float(t), float(fit.slope), float(fit.intercept),
                                  residual, ladder, counts)


def hausdorff_content_slice(cover: SliceCover, e: float) -> float:
    """被覆成分の長さの e 乗和（分解能 r での e 次元 Hausdorff content の上界）"""
    if e <= 0:
        raise ValidationError(f"指数 e は正である必要があります: {e}")
    if cover.is_empty:
        return 0.0
    return math.fsum(float(length) ** e for length in cover.lengths)
