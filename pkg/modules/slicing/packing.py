import math
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np

from utils.errors import OutOfRange, ValidationError
from .cover import SliceCover

logger = logging.getLogger(__name__)

MAX_RUNGS = 64
NEIGHBOURS = 3
GAP_SHRINK = 1e-9


@dataclass(frozen=True, eq=False)
class Packing:
    """中心 y_i・直径 d_i の互いに素な区間の族と Σ d_i^e"""

    items: Tuple[Tuple[float, float], ...]
    delta: float
    exponent: float
    value: float
    strategy: str = "empty"
    rung_histogram: Dict[float, int] = field(default_factory=dict)

    @property
    def item_count(self) -> int:
        return len(self.items)

    def to_dict(self) -> Dict:
        return {
            "delta": self.delta,
            "exponent": self.exponent,
            "value": self.value,
            "item_count": self.item_count,
            "strategy": self.strategy,
            "rung_histogram": {format(d, ".17g"): n for d, n in sorted(self.rung_histogram.items())},
            "items": [list(item) for item in self.items],
        }


def _rung_of(d: float) -> float:
    """d 以下の最大の 2^k"""
    k = math.floor(math.log2(d))
    while 2.0 ** (k + 1) <= d:
        k += 1
    while 2.0 ** k > d:
        k -= 1
    return 2.0 ** k


def dyadic_rungs(delta: float, floor: float) -> List[float]:
    """
    δ 以下の 2^k を大きい順に、floor 以下の最大の 2^k まで並べる

    δ に依存しない格子を使うので、δ を大きくすると候補が増えるだけになる。
    """
    rungs = [_rung_of(delta)]
    while rungs[-1] > floor and len(rungs) < MAX_RUNGS:
        rungs.append(rungs[-1] / 2)
    return rungs


def _candidates(centers: np.ndarray, rungs: Sequence[float], delta: float,
                floor: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    各中心に置ける直径の候補

    二進の段に加えて、近い順に NEIGHBOURS 個までの隣の中心との距離 g から
    g(1-ε)（隣と対称に置ける）と 2g(1-ε)（隣の中心の手前まで届く）を加える。
    距離から作る候補は floor ≤ d ≤ δ を満たすものだけを残す。
    """
    n = len(centers)
    owners: List[int] = []
    diameters: List[float] = []
    for i in range(n):
        choices = set(rungs)
        for k in range(1, NEIGHBOURS + 1):
            for j in (i - k, i + k):
                if 0 <= j < n:
                    gap = abs(float(centers[j] - centers[i])) * (1 - GAP_SHRINK)
                    for d in (gap, 2 * gap):
                        if floor <= d <= delta:
                            choices.add(d)
        for d in sorted(choices, reverse=True):
            owners.append(i)
            diameters.append(d)
    return np.array(owners, dtype=int), np.array(diameters, dtype=float)


def _schedule(lefts: np.ndarray, rights: np.ndarray,
              weights: np.ndarray) -> List[int]:
    """
    重み付き区間スケジューリング（右端の昇順で DP）

    閉区間どうしが交わらない組のうち重みの和が最大のものの添字を返す。
    """
    order = np.lexsort((lefts, rights))
    lefts, rights, weights = lefts[order], rights[order], weights[order]
    # pred[k]: 右端が lefts[k] より真に小さい候補の個数
    pred = np.searchsorted(rights, lefts, side="left")
    m = len(order)
    best = np.zeros(m + 1)
    for k in range(m):
        take = weights[k] + best[pred[k]]
        best[k + 1] = take if take > best[k] else best[k]

    chosen: List[int] = []
    k = m
    while k > 0:
        if best[k] > best[k - 1]:
            chosen.append(int(order[k - 1]))
            k = int(pred[k - 1])
        else:
            k -= 1
    return chosen


def pack_premeasure(cover: SliceCover, delta: float, s: float) -> Packing:
    """
    パッキング前測度 P^{s-1}_δ(K_t) の下からの推定

    中心は被覆の各成分の中点。直径の候補は 2^k ≤ δ の段（下限は 4·r·h(bbox)）と
    隣の中心までの距離から作るもので、互いに素な組のうち Σ d^e が最大のものを
    重み付き区間スケジューリングで選ぶ。δ を大きくすると候補は増えるだけなので、
    同じ被覆に対する値は δ について単調になる。

    Args:
        cover (SliceCover): スライス被覆
        delta (float): 直径の上限 δ
        s (float): 平面集合の次元（指数 e = s-1 > 0）

    Returns:
        Packing: 空の被覆なら値0
    """
    exponent = s - 1
    if exponent <= 0:
        raise ValidationError(f"指数 s-1 は正である必要があります: s={s}")
    if delta <= 0:
        raise OutOfRange(f"δ は正である必要があります: {delta}")
    if cover.is_empty:
        return Packing((), delta, exponent, 0.0)
    if delta < 3 * cover.max_length:
        logger.debug(f"δ={delta} が被覆成分の長さの3倍未満です（中心のずれが大きくなります）")

    centers = np.sort(cover.midpoints)
    floor = 4 * cover.resolution * cover.height
    rungs = dyadic_rungs(delta, floor)
    owners, diameters = _candidates(centers, rungs, delta, floor)
    middle = centers[owners]
    chosen = _schedule(middle - diameters / 2, middle + diameters / 2, diameters ** exponent)

    items = sorted((float(centers[owners[k]]), float(diameters[k])) for k in chosen)
    value = math.fsum(d ** exponent for _, d in items)
    histogram = dict(Counter(_rung_of(d) for _, d in items))
    logger.debug(f"δ={delta:.6g}: 候補 {len(owners)} 個から {len(items)} 個を選びました（値 {value:.6g}）")
    return Packing(tuple(items), delta, exponent, value, "scheduled" if items else "empty", histogram)


def validate_packing(packing: Packing, cover: SliceCover) -> bool:
    """互いに素・直径 ≤ δ・中心が被覆に含まれる、の3条件を確かめる"""
    items = sorted(packing.items)
    for c, d in items:
        if d > packing.delta or d <= 0:
            return False
        if not cover.contains(c):
            return False
    for (c1, d1), (c2, d2) in zip(items, items[1:]):
        if c1 + d1 / 2 >= c2 - d2 / 2:
            return False
    return True
