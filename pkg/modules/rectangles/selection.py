import math
import logging
from typing import Iterable, List, Optional

from modules.ifs_core import Rect
from modules.slicing import Packing
from .construction import RectPair

logger = logging.getLogger(__name__)


def vitali_select(pairs: Iterable[RectPair], region: Optional[Rect] = None) -> List[RectPair]:
    """
    R₂ が互いに交わらない対を貪欲に選ぶ（幅の大きい順、交わるものは捨てる）

    Args:
        pairs (Iterable[RectPair]): 候補
        region (Optional[Rect]): 指定した場合は R₂ がこの中にある候補だけを使う

    Returns:
        List[RectPair]: R₂ が互いに素な部分列（選んだ順）
    """
    candidates = [p for p in pairs if region is None or region.contains_rect(p.R2)]
    # 同じ幅なら入力順を保つ
    ordered = sorted(enumerate(candidates), key=lambda item: (-item[1].R2.width, item[0]))
    selected: List[RectPair] = []
    for _, pair in ordered:
        if any(pair.R2.intersects(other.R2) for other in selected):
            continue
        selected.append(pair)
    logger.debug(f"互いに素な長方形を {len(selected)}/{len(candidates)} 個選びました")
    return selected


def rectangle_packing(pairs: Iterable[RectPair], t: float, s: float,
                      delta: Optional[float] = None) -> Packing:
    """
    選んだ長方形から K_t のパッキングを作る

    射影が t を含む R₂ ごとに区間 {t} × [y - h(R₂)/3, y + h(R₂)/3] を取る。
    R₂ が互いに素なら区間も互いに素。

    Args:
        pairs (Iterable[RectPair]): vitali_select で選んだ対
        t (float): スライスの位置（作業座標系）
        s (float): 次元（指数 s-1）
        delta (Optional[float]): 直径の上限（None なら最大の直径）

    Returns:
        Packing: 値は Σ (2h(R₂)/3)^{s-1}
    """
    exponent = s - 1
    items = sorted(
        (pair.R2.center[1], 2 * pair.R2.height / 3)
        for pair in pairs
        if pair.R2.x0 <= t <= pair.R2.x1
    )
    if delta is None:
        delta = max((d for _, d in items), default=0.0)
    value = math.fsum(d ** exponent for _, d in items)
    return Packing(tuple(items), delta, exponent, value, "rectangles", {})
