import logging
from dataclasses import dataclass, field
from typing import Dict, List, Sequence

import numpy as np
import pandas as pd

from config.settings import settings
from modules.ifs_core import enumerate_partition
from utils.errors import OutOfRange, ValidationError
from utils.intervals import union_length
from .projected_ifs import ProjectedIFS

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DensityHistogram:
    """等幅ビンの質量（bins[i] = [origin + i·w, origin + (i+1)·w)）"""

    bin_width: float
    origin: float
    masses: np.ndarray
    resolution: float

    @property
    def edges(self) -> np.ndarray:
        return self.origin + self.bin_width * np.arange(len(self.masses) + 1)

    @property
    def densities(self) -> np.ndarray:
        return self.masses / self.bin_width

    @property
    def sup_density(self) -> float:
        return float(self.densities.max()) if len(self.masses) else 0.0

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.masses))

    def to_frame(self) -> pd.DataFrame:
        edges = self.edges
        return pd.DataFrame({
            "bin_left": edges[:-1],
            "bin_right": edges[1:],
            "mass": self.masses,
            "density": self.densities,
        })


def _cumulative_mass(lo: np.ndarray, hi: np.ndarray, mass: np.ndarray,
                     at: np.ndarray) -> np.ndarray:
    """
    各区間 [lo,hi] に一様に置いた質量の累積分布を点 at で評価する

    長さ0の区間は点質量として扱う（右連続）。
    """
    total = np.zeros(len(at))
    point = hi <= lo
    if point.any():
        order = np.argsort(lo[point], kind="stable")
        positions = lo[point][order]
        cumulative = np.concatenate([[0.0], np.cumsum(mass[point][order])])
        total += cumulative[np.searchsorted(positions, at, side="right")]

    ramp = ~point
    if ramp.any():
        slope = mass[ramp] / (hi[ramp] - lo[ramp])
        for ends, sign in ((lo[ramp], 1.0), (hi[ramp], -1.0)):
            order = np.argsort(ends, kind="stable")
            sorted_ends = ends[order]
            s1 = np.concatenate([[0.0], np.cumsum(slope[order])])
            s2 = np.concatenate([[0.0], np.cumsum(slope[order] * sorted_ends)])
            idx = np.searchsorted(sorted_ends, at, side="right")
            total += sign * (at * s1[idx] - s2[idx])
    return total


def pushforward_density(pifs: ProjectedIFS, r: float, bins: int) -> DensityHistogram:
    """
    射影測度 π_u μ の [a,b] 上のヒストグラム

    Δ_r の各語 ω について、質量 p_ω = ρ_ω^s を区間 φ_ω([a,b]) に一様に置く。
    ビンごとの誤差は r 程度。

    Args:
        pifs (ProjectedIFS): 射影 IFS（dimension は平面 IFS の s）
        r (float): スケール（0 < r < 1）
        bins (int): ビン数（8以上）

    Returns:
        DensityHistogram: 質量の和は 1（誤差 1e-9 以内）
    """
    if not 0.0 < r < 1.0:
        raise OutOfRange(f"r は (0,1) の範囲である必要があります: {r}")
    if bins < 8:
        raise OutOfRange(f"bins は8以上である必要があります: {bins}")

    a, b = pifs.extent()
    cylinders = enumerate_partition(pifs.ratio_array, pifs.offset_array, r)
    intervals = cylinders.intervals(a, b)
    mass = cylinders.weights(pifs.dimension)

    if b - a <= 0:
        # 射影が1点に潰れた場合は全質量を最初のビンに置く
        width = 1.0 / bins
        masses = np.zeros(bins)
        masses[0] = float(np.sum(mass))
        return DensityHistogram(width, a, masses, r)

    width = (b - a) / bins
    edges = a + width * np.arange(bins + 1)
    cdf = np.empty(bins + 1)
    cdf[0] = 0.0
    cdf[-1] = float(np.sum(mass))
    cdf[1:-1] = _cumulative_mass(intervals[:, 0], intervals[:, 1], mass, edges[1:-1])
    masses = np.clip(np.diff(cdf), 0.0, None)
    logger.debug(f"密度ヒストグラム: r={r}, bins={bins}, |Δ_r|={len(cylinders)}")
    return DensityHistogram(width, a, masses, r)


def estimate_projection_length(pifs: ProjectedIFS, r: float) -> float:
    """Δ_r の区間 φ_ω([a,b]) の和集合の長さ（射影の Lebesgue 測度の上からの近似）"""
    a, b = pifs.extent()
    cylinders = enumerate_partition(pifs.ratio_array, pifs.offset_array, r)
    return union_length(cylinders.intervals(a, b))


@dataclass
class DensityDiagnostic:
    verdict: str
    rungs: List[Dict[str, float]] = field(default_factory=list)
    window: int = 3
    stability: float = 1.2
    note: str = "heuristic"

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rungs)


def density_boundedness_diagnostic(pifs: ProjectedIFS,
                                   r_ladder: Sequence[float]) -> DensityDiagnostic:
    """
    スケールを細かくしたときの sup 密度の振る舞いから有界性を推定する（経験的判定）

    最後の3段で sup 密度の最大/最小 ≤ 1.2 なら BoundedSuggested、
    そうでなく台の長さが 1.2 倍以上縮んでいれば SingularSuggested、
    どちらでもなければ UnboundedSuggested。ビン数は max(8, round(1/r))。

    Args:
        pifs (ProjectedIFS): 射影 IFS
        r_ladder (Sequence[float]): 狭義単調減少な3段以上のスケール

    Returns:
        DensityDiagnostic: 判定と各段の値
    """
    ladder = [float(r) for r in r_ladder]
    if len(ladder) < 3 or any(x <= y for x, y in zip(ladder, ladder[1:])):
        raise ValidationError(f"r_ladder は狭義単調減少な3段以上が必要です: {ladder}")

    config = settings.get_experiment_config()
    stability = config["density_stability"]
    window = 3

    rungs = []
    for r in ladder:
        bins = max(8, int(round(1.0 / r)))
        histogram = pushforward_density(pifs, r, bins)
        rungs.append({
            "r": r,
            "bins": bins,
            "bin_width": histogram.bin_width,
            "sup_density": histogram.sup_density,
            "support_length": estimate_projection_length(pifs, r),
        })

    tail = rungs[-window:]
    sups = [row["sup_density"] for row in tail]
    if min(sups) > 0 and max(sups) / min(sups) <= stability:
        verdict = "BoundedSuggested"
    elif tail[-1]["support_length"] * stability <= tail[0]["support_length"]:
        verdict = "SingularSuggested"
    else:
        verdict = "UnboundedSuggested"
    logger.info(f"密度の有界性判定: {verdict}（sup 密度 {sups}）")
    return DensityDiagnostic(verdict, rungs, window, stability)
