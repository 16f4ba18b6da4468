import logging
from dataclasses import dataclass
from typing import Optional, Tuple

from config.settings import settings
from .projected_ifs import ProjectedIFS, attractor_extent

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NoCoincidence:
    verdict: str = "NoCoincidence"

    @property
    def holds(self) -> bool:
        return True


@dataclass(frozen=True)
class Coincidence:
    """固定点が一致する写像の組（1始まり、i < j）"""

    pairs: Tuple[Tuple[int, int], ...]
    verdict: str = "Coincidence"

    @property
    def holds(self) -> bool:
        return False


@dataclass(frozen=True)
class Holds:
    """端点に固定点を持つ写像が1つだけの側と、その文字"""

    sides: Tuple[str, ...]
    letters: Tuple[int, ...]
    verdict: str = "Holds"

    @property
    def holds(self) -> bool:
        return True

    @property
    def side(self) -> str:
        return self.sides[0]

    def letter_for(self, side: str) -> Optional[int]:
        for s, letter in zip(self.sides, self.letters):
            if s == side:
                return letter
        return None


@dataclass(frozen=True)
class Fails:
    verdict: str = "Fails"

    @property
    def holds(self) -> bool:
        return False


def _resolve_tol(pifs: ProjectedIFS, tol: Optional[float]) -> float:
    if tol is not None:
        return tol
    return 0.0 if pifs.is_exact else settings.get_tolerance_config()["coincidence_tol"]


def check_condition_B(pifs: ProjectedIFS, tol: Optional[float] = None):
    """
    全ての写像の固定点が互いに異なるかを判定する

    Args:
        pifs (ProjectedIFS): 射影 IFS
        tol (Optional[float]): 一致とみなす距離（厳密な IFS では既定 0）

    Returns:
        NoCoincidence | Coincidence: 後者は一致した組を全て持つ
    """
    tol = _resolve_tol(pifs, tol)
    fixed = pifs.fixed_points
    pairs = tuple(
        (i + 1, j + 1)
        for i in range(pifs.q)
        for j in range(i + 1, pifs.q)
        if abs(fixed[i] - fixed[j]) <= tol
    )
    if pairs:
        logger.info(f"固定点の一致を検出しました: {pairs}")
        return Coincidence(pairs)
    return NoCoincidence()


def check_condition_B_prime(pifs: ProjectedIFS, tol: Optional[float] = None):
    """
    凸包 [a,b] のどちらかの端点を固定点に持つ写像がただ1つかを判定する

    Args:
        pifs (ProjectedIFS): 射影 IFS
        tol (Optional[float]): 端点との一致とみなす距離

    Returns:
        Holds | Fails: Holds は成り立つ側（'left' 優先）と文字を持つ
    """
    tol = _resolve_tol(pifs, tol)
    fixed = pifs.fixed_points
    a, b = attractor_extent(pifs)

    sides, letters = [], []
    for side, end in (("left", a), ("right", b)):
        at_end = [j + 1 for j, f in enumerate(fixed) if abs(f - end) <= tol]
        if len(at_end) == 1:
            sides.append(side)
            letters.append(at_end[0])

    if not sides:
        logger.info("両端とも複数の写像が固定点を共有しています")
        return Fails()
    return Holds(tuple(sides), tuple(letters))
