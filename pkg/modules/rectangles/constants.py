import math
import logging
from dataclasses import asdict, dataclass
from typing import Dict, Tuple

from config.settings import settings
from modules.ifs_core import IFS, Separated, check_strong_separation
from modules.projection import (
    Direction,
    Frame,
    check_condition_B_prime,
    estimate_projection_length,
    project_ifs,
)
from utils.errors import AspectUnreachable, ConditionBPrimeFails, NotSeparated, ValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LemmaConstants:
    """
    長方形対の構成に使う定数

    右端で条件が成り立つ場合は方向を反転した座標系で左端として扱う。
    direction がその作業用の方向、source_theta が指定された方向。
    """

    side: str
    letter: int
    rho_l: float
    kappa: float
    N: int
    c: float
    A: float
    eta: float
    direction: Direction
    source_theta: float
    extent: Tuple[float, float]
    height: float
    gap: float
    tau_hat: float
    tau_resolution: float

    @property
    def width(self) -> float:
        return self.extent[1] - self.extent[0]

    @property
    def diameter(self) -> float:
        return math.hypot(self.width, self.height)

    def to_dict(self) -> Dict:
        data = asdict(self)
        data["direction"] = self.direction.theta
        data["extent"] = list(self.extent)
        return data


def find_constants(ifs: IFS, direction: Direction) -> LemmaConstants:
    """
    条件 B′ と強分離から定数 κ, N, c, A, η を求める

    κ = min_{j≠l}(c_j + ρ_j a) - a
    N = ⌈log(κ/(b-a)) / log ρ_l⌉（1以上）
    c = g / (20·max(1, diam))、g は強分離のギャップ
    A = max(1, 2·h⊥·max(1, 1/(b-a)))
    η = ρ_l^N·τ̂/κ、τ̂ は射影の長さの推定値

    Args:
        ifs (IFS): 反復関数系
        direction (Direction): 射影方向

    Returns:
        LemmaConstants: 定数一式
    """
    bprime = check_condition_B_prime(project_ifs(ifs, direction))
    if not bprime.holds:
        raise ConditionBPrimeFails(f"条件 B′ が成り立ちません（{direction}）")
    separation = check_strong_separation(ifs, settings.get_rectangle_config()["ssc_depth"])
    if not isinstance(separation, Separated):
        raise NotSeparated(
            f"強分離条件を確認できません（深さ {separation.depth}, 組 {separation.witness}）"
        )

    side = bprime.side
    letter = bprime.letter_for(side)
    work = direction if side == "left" else direction.reversed()
    frame = Frame.build(ifs, work)
    pifs = frame.along
    a, b = frame.extent
    width = b - a
    ratios = pifs.ratio_array
    offsets = pifs.offset_array
    rho_l = float(ratios[letter - 1])

    kappa = min(offsets[j] + ratios[j] * a for j in range(pifs.q) if j != letter - 1) - a
    N = max(1, math.ceil(math.log(kappa / width) / math.log(rho_l)))

    config = settings.get_rectangle_config()
    diam = math.hypot(width, frame.height)
    c = separation.gap / (config["gap_divisor"] * max(1.0, diam))
    A = max(1.0, 2.0 * frame.height * max(1.0, 1.0 / width))

    resolution = config["tau_resolution"]
    tau_hat = estimate_projection_length(pifs, resolution)
    eta = rho_l ** N * tau_hat / kappa
    # ρ_l^N (b-a) ≤ κ かつ τ̂ ≤ b-a なので η ≤ 1
    if eta > 1 + 1e-9:
        raise ValidationError(f"射影の長さの推定 τ̂={tau_hat:.6g} が b-a={width:.6g} を超えています")
    if not 0 < eta < 1:
        logger.warning(f"η={eta:.6g} が (0,1) の外です（τ̂={tau_hat:.6g}）。区間内に切り詰めます")
        eta = min(max(eta, 0.0), 1.0 - 1e-12)

    logger.info(
        f"定数を求めました: side={side}, l={letter}, κ={kappa:.6g}, N={N}, "
        f"c={c:.6g}, A={A:.6g}, η={eta:.6g}"
    )
    return LemmaConstants(
        side=side,
        letter=letter,
        rho_l=rho_l,
        kappa=float(kappa),
        N=N,
        c=c,
        A=A,
        eta=eta,
        direction=work,
        source_theta=direction.theta,
        extent=(a, b),
        height=frame.height,
        gap=separation.gap,
        tau_hat=tau_hat,
        tau_resolution=resolution,
    )


def minimal_k(consts: LemmaConstants, C: float) -> int:
    """
    縦横比 2c/(ρ_l^{k-1}κ) ≥ C を満たし、R₁ ⊂ R₂ と
    K_{l^{N+k-1}} ⊂ R₂ が保証される最小の k

    Args:
        consts (LemmaConstants): 定数
        C (float): 目標の縦横比

    Returns:
        int: k_C（上限を超えたら AspectUnreachable）
    """
    k_budget = settings.get_rectangle_config()["k_budget"]
    rho_l = consts.rho_l
    for k in range(1, k_budget + 1):
        aspect = 2 * consts.c / (rho_l ** (k - 1) * consts.kappa)
        if (aspect >= C
                and consts.A * rho_l ** k <= 2 * consts.c
                and rho_l ** (consts.N + k - 1) * consts.height <= consts.c):
            return k
    raise AspectUnreachable(f"k ≤ {k_budget} で縦横比 C={C} に届きません")
