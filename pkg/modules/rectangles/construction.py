import math
import logging
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from modules.ifs_core import IFS, Rect, Word, enumerate_partition
from modules.projection import Direction, Frame
from utils.errors import OutOfRange, ValidationError
from utils.intervals import union_length
from .constants import LemmaConstants, find_constants, minimal_k

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RectPair:
    """
    同心の軸平行長方形 R₁ ⊂ R₂（作業座標系 (t, y) での座標）

    R₂ の幅は ρ_ω ρ_l^{k-1} κ、高さは 2cρ_ω。R₁ は同じ幅で高さ Aρ_ω ρ_l^k。
    """

    R1: Rect
    R2: Rect
    word: Word
    k: int
    C: float
    anchor: Tuple[float, float]
    theta: float

    @property
    def aspect(self) -> float:
        return self.R2.height / self.R2.width

    def to_dict(self) -> Dict:
        return {
            "R1": [self.R1.x0, self.R1.x1, self.R1.y0, self.R1.y1],
            "R2": [self.R2.x0, self.R2.x1, self.R2.y0, self.R2.y1],
            "word": list(self.word),
            "k": self.k,
            "C": self.C,
            "anchor": list(self.anchor),
            "theta": self.theta,
        }


@dataclass
class RectCheckReport:
    i: bool
    ii: bool
    iii: bool
    iv: float
    v: float
    eta: float
    prefix_ok: bool
    mu_bracket: Tuple[float, float]
    n_intersecting: int
    n_inside: int
    r: float

    @property
    def iv_pass(self) -> bool:
        return self.iv >= self.eta

    @property
    def passed(self) -> bool:
        """(i)〜(iv) が全て成り立つか"""
        return self.i and self.ii and self.iii and self.iv_pass

    def to_dict(self) -> Dict:
        return {
            "i": self.i,
            "ii": self.ii,
            "iii": self.iii,
            "iv": self.iv,
            "iv_pass": self.iv_pass,
            "v": self.v,
            "eta": self.eta,
            "prefix_ok": self.prefix_ok,
            "mu_bracket": list(self.mu_bracket),
            "n_intersecting": self.n_intersecting,
            "n_inside": self.n_inside,
            "r": self.r,
            "passed": self.passed,
        }


def _word_map(frame: Frame, word: Sequence[int]) -> Tuple[float, np.ndarray]:
    ratios, translations = frame.ratios, frame.translations
    ratio, translation = 1.0, np.zeros(2)
    for letter in word:
        translation = translation + ratio * translations[letter - 1]
        ratio *= ratios[letter - 1]
    return ratio, translation


def _check_frame(direction: Direction, consts: LemmaConstants) -> None:
    if not math.isclose(direction.theta, consts.source_theta, abs_tol=1e-15):
        raise ValidationError(
            f"定数は θ={consts.source_theta} で求めたものです（指定 θ={direction.theta}）"
        )


def build_rect_pair(ifs: IFS, direction: Direction, word: Sequence[int], k: Optional[int],
                    consts: LemmaConstants, C: float) -> RectPair:
    """
    語 ω と k から長方形対 R₁ ⊂ R₂ を作る

    基準点 x は ψ_ω ∘ ψ_l^{N+k-1} の固定点（K_{ω l^{N+k-1}} の点）。
    R₂ = [d, d + ρ_ω ρ_l^{k-1} κ] × [y - cρ_ω, y + cρ_ω]、d = min π(K_ω)。

    Args:
        ifs (IFS): 反復関数系
        direction (Direction): 射影方向（consts を求めたときと同じもの）
        word (Sequence[int]): 語 ω（1始まり、空でもよい）
        k (Optional[int]): k ≥ k_C（None なら k_C）
        consts (LemmaConstants): find_constants の結果
        C (float): 目標の縦横比（> 0）

    Returns:
        RectPair: 縦横比 h(R₂)/w(R₂) ≥ C を満たす対
    """
    _check_frame(direction, consts)
    if C <= 0:
        raise OutOfRange(f"C は正である必要があります: {C}")
    word = tuple(int(letter) for letter in word)
    for letter in word:
        ifs.check_letter(letter)
    k_min = minimal_k(consts, C)
    if k is None:
        k = k_min
    elif k < k_min:
        raise OutOfRange(f"k={k} は k_C={k_min} より小さいため縦横比 C={C} に届きません")

    frame = Frame.build(ifs, consts.direction)
    a = consts.extent[0]
    rho_l = consts.rho_l
    rho_w, t_w = _word_map(frame, word)

    # ψ_ω ∘ ψ_l^M の固定点
    M = consts.N + k - 1
    w_l = frame.translations[consts.letter - 1]
    t_power = w_l * (1 - rho_l ** M) / (1 - rho_l)
    ratio = rho_w * rho_l ** M
    anchor = (t_w + rho_w * t_power) / (1 - ratio)

    d = t_w[0] + rho_w * a
    width = rho_w * rho_l ** (k - 1) * consts.kappa
    y = float(anchor[1])
    R2 = Rect(d, d + width, y - consts.c * rho_w, y + consts.c * rho_w)
    h1 = consts.A * rho_w * rho_l ** k
    R1 = Rect(d, d + width, y - h1 / 2, y + h1 / 2)

    logger.debug(f"長方形対を作成しました: ω={word}, k={k}, 幅={width:.3g}, 縦横比={R2.height / width:.3g}")
    return RectPair(R1, R2, word, k, float(C), (float(anchor[0]), y), consts.direction.theta)


def verify_rect_pair(ifs: IFS, direction: Direction, pair: RectPair, r: float,
                     consts: Optional[LemmaConstants] = None) -> RectCheckReport:
    """
    長方形対が満たすべき性質を Δ_r の外接長方形で確かめる

    (i) R₁ ⊂ R₂・同心・同じ幅・x ∈ R₁、(ii) 縦横比 ≥ C、
    (iii) R₂ と交わるシリンダーの外接長方形が R₁（r·diam だけ膨らませたもの）に入る、
    (iv) R₂ 内のシリンダーの射影の和集合の長さ / w(R₂)、
    (v) R₂ 内のシリンダーの質量 / w(R₂)^s。
    右端の辺に接するだけのシリンダーは交わるとみなさない。

    Args:
        ifs (IFS): 反復関数系
        direction (Direction): 射影方向
        pair (RectPair): 検証する対
        r (float): スケール（r ≤ w(R₂)/16）
        consts (Optional[LemmaConstants]): 定数（None なら求め直す）

    Returns:
        RectCheckReport: 各項目の結果
    """
    if consts is None:
        consts = find_constants(ifs, direction)
    _check_frame(direction, consts)
    R1, R2 = pair.R1, pair.R2
    if not 0 < r <= R2.width / 16:
        raise OutOfRange(f"r は (0, w(R₂)/16 = {R2.width / 16:.3g}] にある必要があります: {r}")

    frame = Frame.build(ifs, consts.direction)
    base = frame.bbox
    margin = r * consts.diameter
    eps = 1e-9 * R2.width + 1e-13 * max(1.0, consts.diameter)
    region = R2.inflated(margin)

    def near_R2(ratios: np.ndarray, translations: np.ndarray) -> np.ndarray:
        x0 = translations[:, 0] + ratios * base.x0
        x1 = translations[:, 0] + ratios * base.x1
        y0 = translations[:, 1] + ratios * base.y0
        y1 = translations[:, 1] + ratios * base.y1
        return ((x1 >= region.x0) & (x0 <= region.x1)
                & (y1 >= region.y0) & (y0 <= region.y1))

    cylinders = enumerate_partition(frame.ratios, frame.translations, r, prune=near_R2)
    boxes = cylinders.boxes(base)
    x0, x1, y0, y1 = boxes.T

    meets = (x1 > R2.x0 + eps) & (x0 < R2.x1 - eps) & (y1 >= R2.y0) & (y0 <= R2.y1)
    inside = ((x0 >= R2.x0 - eps) & (x1 <= R2.x1 + eps)
              & (y0 >= R2.y0 - eps) & (y1 <= R2.y1 + eps))

    center_ok = (math.isclose(R1.center[0], R2.center[0], rel_tol=1e-12, abs_tol=1e-15)
                 and math.isclose(R1.center[1], R2.center[1], rel_tol=1e-12, abs_tol=1e-15))
    check_i = (R2.contains_rect(R1, tol=eps) and center_ok
               and math.isclose(R1.width, R2.width, rel_tol=1e-12)
               and R1.contains_point(*pair.anchor, tol=eps))
    check_ii = R2.height / R2.width >= pair.C * (1 - 1e-12)

    outer = R1.inflated(margin + eps)
    check_iii = bool(np.all(
        (x0[meets] >= outer.x0) & (x1[meets] <= outer.x1)
        & (y0[meets] >= outer.y0) & (y1[meets] <= outer.y1)
    ))

    prefix = pair.word + (consts.letter,) * pair.k
    prefix_ok = all(w[:len(prefix)] == prefix for w, m in zip(cylinders.words, meets) if m)

    inside_intervals = np.column_stack([x0[inside], x1[inside]])
    ratio_iv = union_length(inside_intervals) / R2.width
    mass = cylinders.weights(ifs.dimension)
    ratio_v = float(math.fsum(mass[inside])) / R2.width ** ifs.dimension

    s = ifs.dimension
    rho_w, _ = _word_map(frame, pair.word)
    mu_bracket = (rho_w ** s * consts.rho_l ** (s * (consts.N + pair.k - 1)),
                  rho_w ** s * consts.rho_l ** (pair.k * s))

    report = RectCheckReport(
        i=bool(check_i),
        ii=bool(check_ii),
        iii=check_iii,
        iv=float(ratio_iv),
        v=ratio_v,
        eta=consts.eta,
        prefix_ok=prefix_ok,
        mu_bracket=mu_bracket,
        n_intersecting=int(meets.sum()),
        n_inside=int(inside.sum()),
        r=float(r),
    )
    logger.debug(f"長方形対の検証: ω={pair.word}, 結果={report.passed}")
    return report
