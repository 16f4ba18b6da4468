import math
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from config.settings import settings
from modules.ifs_core import IFS, sample_words
from modules.projection import (
    Direction,
    Frame,
    check_condition_B,
    check_condition_B_prime,
    density_boundedness_diagnostic,
    detect_exact_overlaps,
    project_ifs,
)
from modules.rectangles import (
    build_rect_pair,
    find_constants,
    minimal_k,
    verify_rect_pair,
    vitali_select,
)
from modules.slicing import hausdorff_content_slice, slice_cover
from utils.errors import BudgetExceeded, ValidationError

logger = logging.getLogger(__name__)


def random_angles(count: int, seed: int) -> List[float]:
    """[0, π) 上の一様乱数の角度（生成順）"""
    rng = np.random.default_rng(seed)
    return [float(v) for v in rng.uniform(0.0, math.pi, size=count)]


@dataclass
class SweepReport:
    rows: pd.DataFrame

    @property
    def exceptional_count(self) -> int:
        return int(self.rows["exceptional"].sum())

    @property
    def eligible_count(self) -> int:
        return int(self.rows["eligible"].sum())

    def to_frame(self) -> pd.DataFrame:
        return self.rows

    def to_dict(self) -> Dict[str, Any]:
        return {
            "angles": int(len(self.rows)),
            "exceptional": self.exceptional_count,
            "eligible": self.eligible_count,
            "density_verdicts": self.rows["density_verdict"].value_counts().sort_index().to_dict(),
        }


def _sweep_one(ifs: IFS, theta: float, depth: int, tol: Optional[float],
               r_ladder: Optional[Sequence[float]]) -> Dict[str, Any]:
    direction = Direction(theta)
    pifs = project_ifs(ifs, direction)
    a, b = pifs.extent()
    try:
        overlaps = detect_exact_overlaps(pifs, depth, tol)
        overlap_status = "ok"
    except BudgetExceeded:
        overlaps, overlap_status = [], "budget"
    condition_B = check_condition_B(pifs, tol)
    condition_B_prime = check_condition_B_prime(pifs, tol)

    density_verdict = "skipped"
    if r_ladder:
        try:
            density_verdict = density_boundedness_diagnostic(pifs, r_ladder).verdict
        except BudgetExceeded:
            density_verdict = "budget"

    return {
        "theta": theta,
        "a": a,
        "b": b,
        "overlap_pairs": len(overlaps),
        "overlaps": ";".join(f"{'.'.join(map(str, u))}={'.'.join(map(str, v))}" for u, v in overlaps),
        "overlap_status": overlap_status,
        "condition_B": condition_B.verdict,
        "condition_B_prime": condition_B_prime.verdict,
        "bprime_side": ",".join(getattr(condition_B_prime, "sides", ())),
        "density_verdict": density_verdict,
        "exceptional": bool(overlaps) or not condition_B.holds,
        "eligible": condition_B_prime.holds,
    }


def angle_sweep(ifs: IFS, angles: Sequence[float], depth: Optional[int] = None,
                tol: Optional[float] = None, r_ladder: Optional[Sequence[float]] = None,
                threads: Optional[int] = None) -> SweepReport:
    """
    角度ごとに完全な重なり・条件 B・条件 B′・密度の判定・凸包を調べる

    重なりか固定点の一致が見つかった角度を例外的とみなす。

    Args:
        ifs (IFS): 反復関数系
        angles (Sequence[float]): 角度のリスト（ラジアン）
        depth (Optional[int]): 重なりを探す語の長さ（None なら設定値）
        tol (Optional[float]): 一致の許容誤差
        r_ladder (Optional[Sequence[float]]): 密度判定のスケール（空なら省略）
        threads (Optional[int]): ワーカー数

    Returns:
        SweepReport: 角度ごとの行と集計
    """
    angles = [float(v) for v in angles]
    if any(not math.isfinite(v) for v in angles):
        raise ValidationError(f"角度は有限である必要があります: {angles}")
    config = settings.get_experiment_config()
    depth = depth if depth is not None else config["sweep_depth"]
    r_ladder = config["density_ladder"] if r_ladder is None else r_ladder
    threads = threads or settings.threads

    with ThreadPoolExecutor(max_workers=threads) as executor:
        rows = list(executor.map(lambda theta: _sweep_one(ifs, theta, depth, tol, r_ladder), angles))
    report = SweepReport(pd.DataFrame(rows))
    logger.info(f"角度の走査: {len(angles)} 個中 例外 {report.exceptional_count}, B′ {report.eligible_count}")
    return report


@dataclass
class CrossCheckReport:
    rows: pd.DataFrame
    density_verdict: str
    decay: float
    bounded_away: bool

    @property
    def consistent(self) -> bool:
        """content が0から離れるのは密度が有界と推定される場合だけ、という向きが一致するか"""
        return self.bounded_away == (self.density_verdict == "BoundedSuggested")

    def to_frame(self) -> pd.DataFrame:
        return self.rows

    def to_dict(self) -> Dict[str, Any]:
        return {
            "density_verdict": self.density_verdict,
            "decay": self.decay,
            "bounded_away": self.bounded_away,
            "consistent": self.consistent,
        }


def content_density_cross_check(ifs: IFS, direction: Direction, r_ladder: Sequence[float],
                        count: int = 32, seed: int = 0,
                        density_ladder: Optional[Sequence[float]] = None) -> CrossCheckReport:
    """
    [a,b] 上の一様な t でのスライスの (s-1) 次元 Hausdorff content と密度判定を突き合わせる

    各 r で content の中央値を取り、最後の段 / 最初の段の比が
    content_decay 以上なら「0から離れている」とみなす。

    Args:
        ifs (IFS): 反復関数系
        direction (Direction): 射影方向
        r_ladder (Sequence[float]): 狭義単調減少なスケール
        count (int): t の数
        seed (int): 乱数シード
        density_ladder (Optional[Sequence[float]]): 密度判定のスケール

    Returns:
        CrossCheckReport: 各 r の中央値と判定
    """
    exponent = ifs.dimension - 1
    if exponent <= 0:
        raise ValidationError(f"次元 s={ifs.dimension:.6g} ≤ 1 では指数 s-1 が正になりません")
    ladder = [float(r) for r in r_ladder]
    if len(ladder) < 2 or any(x <= y for x, y in zip(ladder, ladder[1:])):
        raise ValidationError(f"r_ladder は狭義単調減少な2段以上が必要です: {ladder}")
    config = settings.get_experiment_config()

    frame = Frame.build(ifs, direction)
    a, b = frame.extent
    ts = np.sort(np.random.default_rng(seed).uniform(a, b, size=count))

    rows = []
    for r in ladder:
        contents = [hausdorff_content_slice(slice_cover(ifs, direction, float(t), r, frame=frame), exponent)
                    for t in ts]
        rows.append({"r": r, "median_content": float(np.median(contents)),
                     "mean_content": float(np.mean(contents))})

    verdict = density_boundedness_diagnostic(
        frame.along, density_ladder or config["density_ladder"]
    ).verdict
    first, last = rows[0]["median_content"], rows[-1]["median_content"]
    decay = last / first if first > 0 else 0.0
    bounded_away = last > 0 and decay >= config["content_decay"]
    logger.info(f"Hausdorff content の比 {decay:.4g}, 密度判定 {verdict}")
    return CrossCheckReport(pd.DataFrame(rows), verdict, decay, bounded_away)


@dataclass
class WitnessReport:
    rows: pd.DataFrame
    constants: Dict[str, Any]
    brackets: Dict[str, List[float]]
    pass_rates: Dict[str, float]
    selection_mass_fraction: float
    selected: int

    @property
    def c_independent(self) -> bool:
        """最大の C での (v) の範囲が最小の C での範囲を2倍に広げた中に入るか"""
        keys = list(self.brackets)
        if len(keys) < 2:
            return True
        lo, hi = self.brackets[keys[0]]
        lo_last, hi_last = self.brackets[keys[-1]]
        return lo / 2 <= lo_last and hi_last <= 2 * hi

    def to_frame(self) -> pd.DataFrame:
        return self.rows

    def to_dict(self) -> Dict[str, Any]:
        return {
            "constants": self.constants,
            "brackets": self.brackets,
            "pass_rates": self.pass_rates,
            "c_independent": self.c_independent,
            "selection_mass_fraction": self.selection_mass_fraction,
            "selected": self.selected,
        }


def rectangle_witness_study(ifs: IFS, direction: Direction, C_values: Sequence[float],
                         n_words: int = 20, seed: int = 0, word_length: int = 3,
                         threads: Optional[int] = None) -> WitnessReport:
    """
    重みに従って選んだ語 ω について長方形対を作り、検証結果を集計する

    r は各対で w(R₂)/64。最小の C の対について互いに素な選択を行い、
    選ばれた対の質量の割合も報告する。

    Args:
        ifs (IFS): 反復関数系
        direction (Direction): 射影方向
        C_values (Sequence[float]): 縦横比のリスト（昇順に並べ替える）
        n_words (int): 語の数
        seed (int): 乱数シード
        word_length (int): 語の長さ
        threads (Optional[int]): ワーカー数

    Returns:
        WitnessReport: 合格率・(v) の範囲・選択の質量割合
    """
    consts = find_constants(ifs, direction)
    words = sample_words(ifs, n_words, word_length, seed)
    threads = threads or settings.threads
    C_values = sorted(float(C) for C in C_values)

    def witness(task):
        C, word = task
        pair = build_rect_pair(ifs, direction, word, minimal_k(consts, C), consts, C)
        report = verify_rect_pair(ifs, direction, pair, pair.R2.width / 64, consts)
        return pair, report

    tasks = [(C, word) for C in C_values for word in words]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        results = list(executor.map(witness, tasks))

    rows = []
    for (C, word), (pair, report) in zip(tasks, results):
        rows.append({
            "C": C,
            "word": ".".join(map(str, word)),
            "k": pair.k,
            "width": pair.R2.width,
            "i": report.i,
            "ii": report.ii,
            "iii": report.iii,
            "iv": report.iv,
            "iv_pass": report.iv_pass,
            "v": report.v,
            "prefix_ok": report.prefix_ok,
            "passed": report.passed,
        })
    frame = pd.DataFrame(rows)

    brackets, pass_rates = {}, {}
    for C, group in frame.groupby("C", sort=True):
        key = format(float(C), ".17g")
        brackets[key] = [float(group["v"].min()), float(group["v"].max())]
        pass_rates[key] = float(group["passed"].mean())

    # 最小の C の対で互いに素な選択
    first = [(pair, report) for (C, _), (pair, report) in zip(tasks, results) if C == C_values[0]]
    s = ifs.dimension
    masses = {id(pair): report.v * pair.R2.width ** s for pair, report in first}
    selected = vitali_select(pair for pair, _ in first)
    total = math.fsum(masses.values())
    fraction = math.fsum(masses[id(p)] for p in selected) / total if total > 0 else 0.0

    logger.info(f"長方形対の検証: 合格率 {pass_rates}, 選択の質量割合 {fraction:.3f}")
    return WitnessReport(frame, consts.to_dict(), brackets, pass_rates, fraction, len(selected))
