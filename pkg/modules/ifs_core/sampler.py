import logging

import numpy as np

from config.settings import settings
from utils.errors import OutOfRange
from .types import IFS

logger = logging.getLogger(__name__)


def sample_natural_measure(ifs: IFS, n: int, seed: int, burn_in: int = None) -> np.ndarray:
    """
    カオスゲームで自然測度 μ = Σ ρ_j^s ψ_j♯μ の標本を生成する

    写像 j を確率 p_j = ρ_j^s で選び、写像1の固定点から出発する。
    最初の burn_in 点は捨てる（初期化誤差は ρ_max^burn_in·diam 以下）。

    Args:
        ifs (IFS): 反復関数系
        n (int): 返す点の数
        seed (int): 乱数シード（同じシードなら同じ点列）
        burn_in (int): 捨てる点の数（None なら設定値 64）

    Returns:
        np.ndarray: (n,2) の点列
    """
    if n < 1:
        raise OutOfRange(f"n は1以上である必要があります: {n}")
    if burn_in is None:
        burn_in = settings.get_experiment_config()["burn_in"]

    rng = np.random.default_rng(seed)
    p = ifs.weights / ifs.weights.sum()
    letters = rng.choice(ifs.q, size=n + burn_in, p=p)
    ratios = ifs.ratios
    translations = ifs.translations

    x, y = (float(v) for v in ifs.fixed_points[0])
    points = np.empty((n, 2))
    for step, j in enumerate(letters):
        rho = ratios[j]
        x = rho * x + translations[j, 0]
        y = rho * y + translations[j, 1]
        if step >= burn_in:
            points[step - burn_in] = (x, y)

    logger.debug(f"カオスゲーム: {n} 点を生成しました（seed={seed}）")
    return points
