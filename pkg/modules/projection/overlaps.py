import math
import logging
from collections import defaultdict
from typing import Dict, List, Optional, Tuple

from config.settings import settings
from modules.ifs_core import Word, enumerate_level
from modules.ifs_core.types import Scalar
from utils.errors import BudgetExceeded, OutOfRange
from .projected_ifs import ProjectedIFS

logger = logging.getLogger(__name__)

WordMap = Tuple[Scalar, Scalar]


def _word_maps_exact(pifs: ProjectedIFS, depth: int) -> Dict[Word, WordMap]:
    maps: Dict[Word, WordMap] = {}
    frontier = [((), (1, 0))]
    for _ in range(depth):
        children = []
        for word, (rho, c) in frontier:
            for j, (rho_j, c_j) in enumerate(zip(pifs.ratios, pifs.offsets), start=1):
                child = (word + (j,), (rho * rho_j, c + rho * c_j))
                maps[child[0]] = child[1]
                children.append(child)
        frontier = children
    return maps


def _word_maps_float(pifs: ProjectedIFS, depth: int, budget: int) -> Dict[Word, WordMap]:
    maps: Dict[Word, WordMap] = {}
    for k in range(1, depth + 1):
        level = enumerate_level(pifs.ratio_array, pifs.offset_array, k, budget=budget)
        for word, rho, c in zip(level.words, level.ratios, level.translations[:, 0]):
            maps[word] = (float(rho), float(c))
    return maps


def _same(m1: WordMap, m2: WordMap, tol: float) -> bool:
    return abs(m1[0] - m2[0]) <= tol and abs(m1[1] - m2[1]) <= tol


def _candidate_pairs(maps: Dict[Word, WordMap], tol: float) -> List[Tuple[Word, Word]]:
    """写像が一致する語の組を、量子化したセルと隣接セルだけ調べて集める"""
    buckets = defaultdict(list)
    if tol == 0:
        for word, m in maps.items():
            buckets[m].append(word)
        return [
            (u, v)
            for words in buckets.values()
            for i, u in enumerate(words)
            for v in words[i + 1:]
        ]

    for word, (rho, c) in maps.items():
        buckets[(math.floor(rho / tol), math.floor(c / tol))].append(word)
    pairs = []
    for (kr, kc), words in buckets.items():
        for dr in (-1, 0, 1):
            for dc in (-1, 0, 1):
                other = buckets.get((kr + dr, kc + dc))
                if not other:
                    continue
                for u in words:
                    for v in other:
                        if (len(u), u) < (len(v), v) and _same(maps[u], maps[v], tol):
                            pairs.append((u, v))
    return pairs


def _is_minimal(u: Word, v: Word, maps: Dict[Word, WordMap], tol: float) -> bool:
    """真の接頭辞の組 (u[:i], v[:k]) に一致するものがなければ最小"""
    for i in range(1, len(u) + 1):
        for k in range(1, len(v) + 1):
            if (i, k) == (len(u), len(v)):
                continue
            if _same(maps[u[:i]], maps[v[:k]], tol):
                return False
    return True


def detect_exact_overlaps(pifs: ProjectedIFS, depth: int, tol: Optional[float] = None,
                          minimal: bool = True,
                          budget: Optional[int] = None) -> List[Tuple[Word, Word]]:
    """
    長さ depth 以下の異なる語 u ≠ v で φ_u = φ_v となる組を探す

    minimal=True なら、共通の接頭辞を持つ組や、より短い一致の連結で
    説明できる組（真の接頭辞同士が一致する組）を除く。

    Args:
        pifs (ProjectedIFS): 射影 IFS
        depth (int): 語の長さの上限（1以上）
        tol (Optional[float]): 一致の許容誤差（厳密な IFS では既定 0）
        minimal (bool): 最小の組だけを返すか
        budget (Optional[int]): 列挙する語数の上限

    Returns:
        List[Tuple[Word, Word]]: (短い語, 長い語) の順、辞書順に並べた組
    """
    if depth < 1:
        raise OutOfRange(f"depth は1以上である必要があります: {depth}")
    budget = settings.cylinder_budget if budget is None else budget
    total = sum(pifs.q ** k for k in range(1, depth + 1))
    if total > budget:
        raise BudgetExceeded(f"長さ {depth} 以下の語数 {total} が上限 {budget} を超えます")
    if tol is None:
        tol = 0.0 if pifs.is_exact else settings.get_tolerance_config()["coincidence_tol"]

    if pifs.is_exact:
        maps = _word_maps_exact(pifs, depth)
    else:
        maps = _word_maps_float(pifs, depth, budget)

    pairs = []
    for u, v in _candidate_pairs(maps, tol):
        if (len(v), v) < (len(u), u):
            u, v = v, u
        if minimal and not _is_minimal(u, v, maps, tol):
            continue
        pairs.append((u, v))
    pairs.sort(key=lambda p: (len(p[0]), p[0], len(p[1]), p[1]))
    logger.info(f"完全な重なりを {len(pairs)} 組検出しました（depth={depth}, minimal={minimal}）")
    return pairs
