import math
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from config.settings import settings
from modules.ifs_core import IFS, Separated, check_strong_separation
from modules.projection import Frame, check_condition_B_prime
from modules.slicing import box_dimension_slice, pack_premeasure, slice_cover
from utils.errors import BudgetExceeded, ScenarioError
from .scenario import Scenario

logger = logging.getLogger(__name__)


def check_hypotheses(ifs: IFS, frame: Frame) -> List[str]:
    """条件 B′ と強分離を確かめ、満たさないものを警告として返す"""
    warnings = []
    if not check_condition_B_prime(frame.along).holds:
        warnings.append(f"条件 B′ が成り立ちません（θ={frame.direction.theta:.6g}）")
    separation = check_strong_separation(ifs, settings.get_rectangle_config()["ssc_depth"])
    if not isinstance(separation, Separated):
        warnings.append(f"強分離条件を確認できません（深さ {separation.depth}）")
    for message in warnings:
        logger.warning(message + "。対照ケースとして続行します")
    return warnings


def _quartiles(values: np.ndarray) -> Dict[str, float]:
    if len(values) == 0:
        return {"n": 0, "mean": math.nan, "median": math.nan, "q1": math.nan, "q3": math.nan}
    q1, median, q3 = np.percentile(values, [25, 50, 75])
    return {
        "n": int(len(values)),
        "mean": float(np.mean(values)),
        "median": float(median),
        "q1": float(q1),
        "q3": float(q3),
    }


@dataclass
class TrendReport:
    """δ の段ごとのパッキング前測度の統計と判定"""

    rows: pd.DataFrame
    statistics: pd.DataFrame
    verdicts: Dict[str, str]
    growth: Dict[str, float]
    monotone_fraction: float
    warnings: List[str] = field(default_factory=list)
    dimension: float = math.nan
    budget_failures: int = 0

    @property
    def verdict(self) -> str:
        if not self.verdicts:
            return "NotGrowing"
        return "Growing" if all(v == "Growing" for v in self.verdicts.values()) else "NotGrowing"

    @property
    def contrast(self) -> bool:
        """仮定を満たさない対照ケースか"""
        return bool(self.warnings)

    def to_frame(self) -> pd.DataFrame:
        return self.rows

    def to_dict(self) -> Dict[str, Any]:
        return {
            "verdict": self.verdict,
            "verdicts": self.verdicts,
            "growth": self.growth,
            "growth_threshold": settings.get_experiment_config()["growth_factor"],
            "monotone_fraction": self.monotone_fraction,
            "contrast": self.contrast,
            "warnings": self.warnings,
            "dimension": self.dimension,
            "budget_failures": self.budget_failures,
            "statistics": self.statistics.to_dict(orient="records"),
            "note": "growth of a lower-bound estimator over a finite ladder; "
                    "cover midpoints stand in for points of the slice",
        }


def _growth_verdict(medians: List[float], factor: float):
    """δ を小さくしていくとき中央値が単調非減少で、全体で factor 倍以上増えるか"""
    if any(math.isnan(m) for m in medians) or medians[0] <= 0:
        return "NotGrowing", math.nan
    growth = medians[-1] / medians[0]
    monotone = all(y >= x for x, y in zip(medians, medians[1:]))
    return ("Growing" if monotone and growth >= factor else "NotGrowing"), growth


def _premeasure_task(args):
    ifs, frame, t, delta, r, s = args
    try:
        cover = slice_cover(ifs, frame.direction, t, r, frame=frame)
        packing = pack_premeasure(cover, delta, s)
        return {
            "lower_bound": packing.value,
            "items": packing.item_count,
            "components": cover.component_count,
            "strategy": packing.strategy,
            "status": "ok",
        }
    except BudgetExceeded as e:
        logger.warning(f"列挙上限により t={t:.6g}, δ={delta} を打ち切りました: {str(e)}")
        return {"lower_bound": math.nan, "items": 0, "components": 0,
                "strategy": "", "status": "budget"}


def divergence_study(sc: Scenario, threads: Optional[int] = None) -> TrendReport:
    """
    t の格子と δ の段についてパッキング前測度の下界を計算し、増加傾向を判定する

    lower_bound は r = sc.cover_resolution(δ) の被覆での値、premeasure はそれを
    δ 以下の段について最大化した値（δ について単調非減少）。
    判定は lower_bound の中央値に対して行う。

    Args:
        sc (Scenario): シナリオ
        threads (Optional[int]): ワーカー数（None なら settings の値）

    Returns:
        TrendReport: 結果表・統計・判定
    """
    ifs = sc.load_ifs()
    s = ifs.dimension
    if s <= 1:
        raise ScenarioError(f"次元 s={s:.6g} ≤ 1 では指数 s-1 が正になりません")
    threads = threads or settings.threads
    factor = settings.get_experiment_config()["growth_factor"]

    frames = [Frame.build(ifs, d) for d in sc.directions]
    warnings: List[str] = []
    tasks, keys = [], []
    for frame in frames:
        warnings.extend(check_hypotheses(ifs, frame))
        grid = sc.grid.build(ifs, frame, sc.seed)
        for t_index, t in enumerate(grid):
            for delta in sc.deltas:
                r = sc.cover_resolution(delta)
                tasks.append((ifs, frame, float(t), delta, r, s))
                keys.append((frame.direction.theta, t_index, float(t), delta, r))

    logger.info(f"発散の計算を開始します: タスク {len(tasks)} 個, ワーカー {threads}")
    with ThreadPoolExecutor(max_workers=threads) as executor:
        results = list(executor.map(_premeasure_task, tasks))

    rows = pd.DataFrame([
        {"theta": theta, "t_index": t_index, "t": t, "delta": delta, "r": r, **result}
        for (theta, t_index, t, delta, r), result in zip(keys, results)
    ])
    rows = rows.sort_values(["theta", "t_index", "delta"], ascending=[True, True, False],
                            kind="stable").reset_index(drop=True)

    # 細かい段から累積最大を取ると δ について単調になる
    rows["premeasure"] = (
        rows.iloc[::-1]
        .groupby(["theta", "t_index"], sort=False)["lower_bound"]
        .cummax()
        .iloc[::-1]
    )

    monotone = rows.groupby(["theta", "t_index"])["premeasure"].apply(
        lambda p: bool(np.all(np.diff(p.to_numpy()) <= 0))
    )

    statistics, verdicts, growth = [], {}, {}
    for theta, group in rows.groupby("theta", sort=True):
        medians = []
        for delta in sc.deltas:
            at = group[group["delta"] == delta]
            lower = at["lower_bound"].dropna().to_numpy()
            stats_row = _quartiles(lower)
            stats_row.update({
                "theta": float(theta),
                "delta": delta,
                "premeasure_median": float(np.median(at["premeasure"].dropna()))
                if at["premeasure"].notna().any() else math.nan,
            })
            statistics.append(stats_row)
            medians.append(stats_row["median"])
        key = format(float(theta), ".17g")
        verdicts[key], growth[key] = _growth_verdict(medians, factor)
        logger.info(f"θ={theta:.6g}: 判定 {verdicts[key]}（増加率 {growth[key]:.4g}）")

    return TrendReport(
        rows=rows,
        statistics=pd.DataFrame(statistics),
        verdicts=verdicts,
        growth=growth,
        monotone_fraction=float(monotone.mean()) if len(monotone) else 1.0,
        warnings=warnings,
        dimension=s,
        budget_failures=int((rows["status"] == "budget").sum()),
    )


@dataclass
class SliceDimensionReport:
    rows: pd.DataFrame
    target: float
    band: float
    median: float
    iqr: float
    excluded: int

    @property
    def within_band(self) -> bool:
        return not math.isnan(self.median) and abs(self.median - self.target) <= self.band

    def to_frame(self) -> pd.DataFrame:
        return self.rows

    def to_dict(self) -> Dict[str, Any]:
        return {
            "target": self.target,
            "band": self.band,
            "median": self.median,
            "iqr": self.iqr,
            "excluded_empty": self.excluded,
            "within_band": self.within_band,
        }


def _slice_dimension_task(args):
    ifs, frame, t, ladder = args
    try:
        estimate = box_dimension_slice(ifs, frame.direction, t, ladder, frame=frame)
        return estimate.slope, estimate.residual, estimate.is_empty, "ok"
    except BudgetExceeded as e:
        logger.warning(f"列挙上限により t={t:.6g} のスライス次元を打ち切りました: {str(e)}")
        return math.nan, math.nan, False, "budget"


def slice_dimension_study(sc: Scenario, threads: Optional[int] = None) -> SliceDimensionReport:
    """
    t の格子上でスライスの箱次元を推定し、中央値を s-1 と比べる

    空のスライスは統計から除き、その数を報告する。

    Args:
        sc (Scenario): シナリオ
        threads (Optional[int]): ワーカー数

    Returns:
        SliceDimensionReport: 中央値・四分位範囲・帯 ±0.15 に入るか
    """
    ifs = sc.load_ifs()
    threads = threads or settings.threads
    band = settings.get_experiment_config()["slice_band"]

    tasks, keys = [], []
    for direction in sc.directions:
        frame = Frame.build(ifs, direction)
        grid = sc.grid.build(ifs, frame, sc.seed)
        for t_index, t in enumerate(grid):
            tasks.append((ifs, frame, float(t), sc.slice_r))
            keys.append((direction.theta, t_index, float(t)))

    with ThreadPoolExecutor(max_workers=threads) as executor:
        results = list(executor.map(_slice_dimension_task, tasks))

    rows = pd.DataFrame([
        {"theta": theta, "t_index": t_index, "t": t, "slope": slope,
         "residual": residual, "empty": empty, "status": status}
        for (theta, t_index, t), (slope, residual, empty, status) in zip(keys, results)
    ])
    used = rows[(~rows["empty"]) & (rows["status"] == "ok")]["slope"].to_numpy()
    if len(used):
        q1, median, q3 = np.percentile(used, [25, 50, 75])
    else:
        q1 = median = q3 = math.nan
    report = SliceDimensionReport(
        rows=rows,
        target=ifs.dimension - 1,
        band=band,
        median=float(median),
        iqr=float(q3 - q1),
        excluded=int(rows["empty"].sum()),
    )
    logger.info(f"スライス次元: 中央値 {report.median:.4f}, 目標 {report.target:.4f}, 除外 {report.excluded}")
    return report
