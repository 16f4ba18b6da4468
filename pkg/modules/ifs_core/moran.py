import math
import logging
from typing import Sequence

from utils.errors import EmptyOrSingleton, OutOfRange

logger = logging.getLogger(__name__)

MAX_ITERATIONS = 200


def moran_sum(ratios: Sequence[float], s: float) -> float:
    return math.fsum(r ** s for r in ratios)


def solve_moran(ratios: Sequence[float], tol: float = 1e-13) -> float:
    """
    Moran 方程式 Σ ρ_j^s = 1 を二分法で解き、相似次元 s を返す

    s ↦ Σ ρ_j^s は狭義単調減少なので解は一意。探索区間は
    [0, 2·log(q)/log(1/max ρ)]（右端で Σ ρ^s ≤ 1/q < 1）。
    区間幅が tol を下回っても浮動小数点で区間が縮まなくなるまで続ける。

    Args:
        ratios (Sequence[float]): 縮小率のリスト（各要素は (0,1)）
        tol (float): s に対する許容誤差の上限

    Returns:
        float: 相似次元 s
    """
    ratios = [float(r) for r in ratios]
    if len(ratios) < 2:
        raise EmptyOrSingleton(f"縮小率は2つ以上必要です（{len(ratios)}個）")
    for r in ratios:
        if not 0.0 < r < 1.0:
            raise OutOfRange(f"縮小率 {r} は (0,1) の範囲外です")

    lo = 0.0
    hi = 2.0 * math.log(len(ratios)) / math.log(1.0 / max(ratios))

    for _ in range(MAX_ITERATIONS):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if moran_sum(ratios, mid) > 1.0:
            lo = mid
        else:
            hi = mid

    s = 0.5 * (lo + hi)
    if hi - lo > tol:
        logger.warning(f"Moran 方程式の二分法が収束しませんでした: 幅={hi - lo:.3e}")
    return s
