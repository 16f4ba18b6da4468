import math
import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from config.settings import settings
from utils.errors import BudgetExceeded, OutOfRange
from .cylinders import enumerate_level, partition_set
from .types import IFS, Rect

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Separated:
    gap: float
    depth: int


@dataclass(frozen=True)
class NotSeparatedAtDepth:
    depth: int
    witness: Tuple[int, int]
    distance: float


def attractor_bbox(ifs: IFS) -> Rect:
    """
    アトラクタの外接長方形

    各座標の写像は単調増加なので、最小値・最大値はそれぞれ
    固定点 w_j/(1-ρ_j) の最小・最大で与えられる。

    Args:
        ifs (IFS): 反復関数系

    Returns:
        Rect: アトラクタを含み、角の座標が実際に達成される長方形
    """
    fixed = ifs.fixed_points
    return Rect(float(fixed[:, 0].min()), float(fixed[:, 0].max()),
                float(fixed[:, 1].min()), float(fixed[:, 1].max()))


def box_distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """(n,4) と (m,4) の長方形同士のユークリッド距離行列 (n,m)"""
    dx = np.maximum(0.0, np.maximum(b[None, :, 0] - a[:, None, 1], a[:, None, 0] - b[None, :, 1]))
    dy = np.maximum(0.0, np.maximum(b[None, :, 2] - a[:, None, 3], a[:, None, 2] - b[None, :, 3]))
    return np.hypot(dx, dy)


def min_box_distance(a: np.ndarray, b: np.ndarray, chunk: int = 512) -> float:
    best = math.inf
    for start in range(0, len(a), chunk):
        d = box_distances(a[start:start + chunk], b)
        if d.size:
            best = min(best, float(d.min()))
    return best


def check_strong_separation(ifs: IFS, max_depth: int = 6):
    """
    強分離条件の証明（外接長方形による被覆で距離の下界を得る）

    深さ n の被覆（長さ n の語の外接長方形）で、全ての i<j について
    ψ_i(K) と ψ_j(K) の被覆間距離が正になれば Separated を返す。

    Args:
        ifs (IFS): 反復関数系
        max_depth (int): 試す最大の深さ

    Returns:
        Separated | NotSeparatedAtDepth: 後者は重なりの証明ではない
    """
    if max_depth < 1:
        raise OutOfRange(f"max_depth は1以上である必要があります: {max_depth}")

    base = attractor_bbox(ifs)
    positive = settings.get_tolerance_config()["partition_slack"] * max(base.diameter, 1.0)
    q = ifs.q
    result = NotSeparatedAtDepth(0, (1, 2), 0.0)

    for depth in range(1, max_depth + 1):
        try:
            level = enumerate_level(ifs.ratios, ifs.translations, depth)
        except BudgetExceeded:
            logger.info(f"強分離の判定を深さ {depth} で打ち切りました（列挙上限）")
            break
        boxes = level.boxes(base)
        groups = boxes.reshape(q, -1, 4)

        gap = math.inf
        witness = (1, 2)
        for i in range(q):
            for j in range(i + 1, q):
                d = min_box_distance(groups[i], groups[j])
                if d < gap:
                    gap, witness = d, (i + 1, j + 1)

        if gap > positive:
            logger.info(f"強分離条件を確認しました: 深さ={depth}, ギャップ={gap:.6g}")
            return Separated(gap=gap, depth=depth)
        result = NotSeparatedAtDepth(depth=depth, witness=witness, distance=gap)

    return result


def measure_separation_constant(ifs: IFS, r: float, n_pairs: int = 1000,
                                seed: int = 0) -> float:
    """
    Δ_r の異なる2語について dist(bbox K_i, bbox K_j) ≥ γ·r となる γ を経験的に測る

    Args:
        ifs (IFS): 反復関数系
        r (float): スケール
        n_pairs (int): ランダムに選ぶ組の数
        seed (int): 乱数シード

    Returns:
        float: 測定した組の中での dist/r の最小値
    """
    cylinders = partition_set(ifs, r)
    if len(cylinders) < 2:
        return math.inf
    boxes = cylinders.boxes(attractor_bbox(ifs))
    rng = np.random.default_rng(seed)
    i = rng.integers(0, len(cylinders), size=n_pairs)
    j = rng.integers(0, len(cylinders) - 1, size=n_pairs)
    j = np.where(j >= i, j + 1, j)
    a, b = boxes[i], boxes[j]
    dx = np.maximum(0.0, np.maximum(b[:, 0] - a[:, 1], a[:, 0] - b[:, 1]))
    dy = np.maximum(0.0, np.maximum(b[:, 2] - a[:, 3], a[:, 2] - b[:, 3]))
    return float(np.hypot(dx, dy).min() / r)
