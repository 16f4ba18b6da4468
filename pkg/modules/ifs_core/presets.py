from fractions import Fraction
from typing import Union

from utils.errors import ValidationError
from .types import IFS

Number = Union[float, Fraction]


def four_corner(rho: Number = 0.3) -> IFS:
    """単位正方形の4隅に縮小率 rho の正方形を置いた集合（rho < 1/2 で強分離）"""
    side = 1 - rho
    return IFS.from_pairs([
        (rho, (0, 0)),
        (rho, (side, 0)),
        (rho, (0, side)),
        (rho, (side, side)),
    ])


def product_cantor(rho: Number = 0.4, offset: Number = 0.6) -> IFS:
    """C×C（C は縮小率 rho、平行移動 {0, offset} の Cantor 集合）"""
    return IFS.from_pairs([
        (rho, (0, 0)),
        (rho, (offset, 0)),
        (rho, (0, offset)),
        (rho, (offset, offset)),
    ])


def diagonal_pair(rho: Number = 0.4) -> IFS:
    """対角線上の2写像（θ=0 で左端が1片にだけ接する例）"""
    return IFS.from_pairs([
        (rho, (0, 0)),
        (rho, (1 - rho, 1 - rho)),
    ])


def full_square() -> IFS:
    """縮小率 1/2 の4写像で単位正方形そのもの（s=2）"""
    half = Fraction(1, 2)
    return IFS.from_pairs([
        (half, (0, 0)),
        (half, (half, 0)),
        (half, (0, half)),
        (half, (half, half)),
    ])


PRESETS = {
    "four_corner": four_corner,
    "product_cantor": product_cantor,
    "diagonal_pair": diagonal_pair,
    "full_square": full_square,
}


def preset_by_name(name: str, *args) -> IFS:
    try:
        factory = PRESETS[name]
    except KeyError:
        raise ValidationError(f"未知のプリセットです: {name}（候補: {', '.join(PRESETS)}）")
    return factory(*args)
